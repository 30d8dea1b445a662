#pragma once

#include <string>

#include "error.hpp"
#include "extended.hpp"

namespace jbound {

/// A connected subset of the real line, bounded or not, with each finite end
/// either included or excluded. Infinite ends are never closed.
class Interval {
 public:
  Interval() = default;
  Interval(ExtReal lo, ExtReal hi, bool lo_closed, bool hi_closed)
      : lo_(lo), hi_(hi), lo_closed_(lo_closed && lo.is_finite()), hi_closed_(hi_closed && hi.is_finite()) {
    if (lo > hi) throw Error(ErrorKind::InvalidArgument, "interval with lo > hi");
    if ((lo_closed && !lo.is_finite()) || (hi_closed && !hi.is_finite()))
      throw Error(ErrorKind::InvalidArgument, "infinite interval ends cannot be closed");
    if (lo == hi && !(lo_closed_ && hi_closed_))
      throw Error(ErrorKind::InvalidArgument, "degenerate interval must be closed");
  }

  static Interval real_line() { return {ExtReal::neg_inf(), ExtReal::pos_inf(), false, false}; }
  static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
  static Interval open(ExtReal lo, ExtReal hi) { return {lo, hi, false, false}; }
  static Interval point(double x) { return {x, x, true, true}; }

  ExtReal lo() const { return lo_; }
  ExtReal hi() const { return hi_; }
  bool lo_closed() const { return lo_closed_; }
  bool hi_closed() const { return hi_closed_; }
  bool is_point() const { return lo_ == hi_; }

  bool contains(ExtReal t) const {
    if (t < lo_ || t > hi_) return false;
    if (t == lo_ && !lo_closed_) return false;
    if (t == hi_ && !hi_closed_) return false;
    return true;
  }

  /// Membership in the open interior (lo, hi).
  bool interior_contains(ExtReal t) const { return lo_ < t && t < hi_; }

  std::string to_string() const {
    return std::string(lo_closed_ ? "[" : "(") + lo_.to_string() + ", " + hi_.to_string() + (hi_closed_ ? "]" : ")");
  }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  ExtReal lo_ = ExtReal::neg_inf();
  ExtReal hi_ = ExtReal::pos_inf();
  bool lo_closed_ = false;
  bool hi_closed_ = false;
};

}  // namespace jbound
