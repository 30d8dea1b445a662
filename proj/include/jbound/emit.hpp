#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "error.hpp"

namespace jbound {

using Cell = std::variant<double, long long, bool, std::string>;

/// Homogeneous rows under a fixed header.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw Error(ErrorKind::InvalidArgument, "row width differs from header");
    rows.push_back(std::move(row));
  }
};

enum class OutputFormat { Csv, Json };

/// 17 significant digits; non-finite values as inf, -inf, nan.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace detail {

inline std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<V, long long>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<V, bool>) {
          return v ? "true" : "false";
        } else {
          return v;
        }
      },
      c);
}

inline std::string cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return "\"" + format_double(*d) + "\"";
    return format_double(*d);
  }
  if (const auto* s = std::get_if<std::string>(&c)) return nlohmann::json(*s).dump();
  return cell_text(c);
}

}  // namespace detail

inline void emit_csv(const Table& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_field(t.columns[i]);
  out << "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(detail::cell_text(row[i]));
    out << "\r\n";
  }
}

/// Array of objects, one per row, keys in column order.
inline void emit_json(const Table& t, std::ostream& out) {
  out << "[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out << (r ? ",\n  {" : "\n  {");
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      out << (i ? ", " : "") << nlohmann::json(t.columns[i]).dump() << ": " << detail::cell_json(t.rows[r][i]);
    out << "}";
  }
  out << (t.rows.empty() ? "]\n" : "\n]\n");
}

inline void emit(const Table& t, OutputFormat f, std::ostream& out) {
  if (f == OutputFormat::Csv) {
    emit_csv(t, out);
  } else {
    emit_json(t, out);
  }
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "failed to write output");
}

}  // namespace jbound
