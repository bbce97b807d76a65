#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gdlab::calculus {

/// Value and first two derivatives of a scalar function at a point.
struct Derivs012 {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Result of evaluating a piecewise function; `on_breakpoint` is raised when
/// the input coincides exactly with a breakpoint.
struct Eval012 {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  bool on_breakpoint = false;
};

/// One analytic piece. Must be total on the closure of its interval.
using Piece = std::function<Derivs012(double)>;

/// A scalar function that is analytic on every open interval between a
/// finite, strictly increasing list of breakpoints.
///
/// With breakpoints b_0 < ... < b_{n-1}, piece i covers (b_{i-1}, b_i), with
/// b_{-1} = -inf and b_n = +inf. At x == b_i the value is boundary_values[i]
/// and the derivatives are the one-sided limits of the left piece i.
class PiecewiseFn {
 public:
  PiecewiseFn(std::vector<double> breakpoints, std::vector<Piece> pieces,
              std::vector<double> boundary_values, std::string name = "");

  Eval012 eval(double x) const;

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::size_t piece_count() const { return pieces_.size(); }
  bool has_breakpoints() const { return !breakpoints_.empty(); }

  /// Distance from x to the nearest breakpoint; +inf when there are none.
  double distance_to_breakpoint(double x) const;

  const std::string& name() const { return name_; }

 private:
  std::vector<double> breakpoints_;
  std::vector<Piece> pieces_;
  std::vector<double> boundary_values_;
  std::string name_;
};

/// Validating constructor. Throws ValidationError on non-increasing
/// breakpoints or inconsistent lengths.
PiecewiseFn make_piecewise(std::vector<double> breakpoints, std::vector<Piece> pieces,
                           std::vector<double> boundary_values, std::string name = "");

/// Throws DomainError for non-finite x.
Eval012 eval012(const PiecewiseFn& f, double x);

}  // namespace gdlab::calculus
