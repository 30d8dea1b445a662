#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jbound {

enum class ErrorKind {
  InvalidArgument,
  DomainError,
  ClassificationError,
  NonIntegrable,
  DomainViolation,
  MeanOutsideDomain,
  HypothesisViolation,
  QuadratureFailure,
  Divergent,
  OutsideDomain,
  EmptyFeasibleSet,
  NoFiniteValue,
  RadiusViolation,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ClassificationError: return "ClassificationError";
    case ErrorKind::NonIntegrable: return "NonIntegrable";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::MeanOutsideDomain: return "MeanOutsideDomain";
    case ErrorKind::HypothesisViolation: return "HypothesisViolation";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::Divergent: return "Divergent";
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::EmptyFeasibleSet: return "EmptyFeasibleSet";
    case ErrorKind::NoFiniteValue: return "NoFiniteValue";
    case ErrorKind::RadiusViolation: return "RadiusViolation";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library. `clause()` is set for hypothesis
/// violations (1-based clause number), `field()` for configuration errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int clause() const noexcept { return clause_; }
  const std::string& field() const noexcept { return field_; }

  static Error hypothesis(int clause, const std::string& message) {
    Error e(ErrorKind::HypothesisViolation, "clause (" + std::to_string(clause) + "): " + message);
    e.clause_ = clause;
    return e;
  }

  static Error config(const std::string& field, const std::string& message) {
    Error e(ErrorKind::ConfigError, field + ": " + message);
    e.field_ = field;
    return e;
  }

 private:
  ErrorKind kind_;
  int clause_ = 0;
  std::string field_;
};

}  // namespace jbound
