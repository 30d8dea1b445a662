#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <string>

#include "error.hpp"

namespace jbound {

/// A point of the extended real line [-inf, +inf]. NaN is rejected, so the
/// ordering is total.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  ExtReal(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v)) throw Error(ErrorKind::InvalidArgument, "NaN is not an extended real");
  }

  static ExtReal pos_inf() { return ExtReal(std::numeric_limits<double>::infinity()); }
  static ExtReal neg_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }

  bool is_finite() const { return std::isfinite(v_); }
  bool is_pos_inf() const { return v_ == std::numeric_limits<double>::infinity(); }
  bool is_neg_inf() const { return v_ == -std::numeric_limits<double>::infinity(); }
  double value() const { return v_; }
  explicit operator double() const { return v_; }

  friend std::strong_ordering operator<=>(ExtReal a, ExtReal b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (a.v_ > b.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }

  std::string to_string() const {
    if (is_pos_inf()) return "+inf";
    if (is_neg_inf()) return "-inf";
    return std::to_string(v_);
  }

 private:
  double v_ = 0.0;
};

}  // namespace jbound
