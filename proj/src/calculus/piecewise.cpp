#include "gdlab/calculus/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gdlab/errors.hpp"

namespace gdlab::calculus {

PiecewiseFn::PiecewiseFn(std::vector<double> breakpoints, std::vector<Piece> pieces,
                         std::vector<double> boundary_values, std::string name)
    : breakpoints_(std::move(breakpoints)),
      pieces_(std::move(pieces)),
      boundary_values_(std::move(boundary_values)),
      name_(std::move(name)) {
  if (pieces_.size() != breakpoints_.size() + 1) {
    throw ValidationError("piecewise function needs breakpoints+1 pieces, got " +
                          std::to_string(pieces_.size()) + " pieces for " +
                          std::to_string(breakpoints_.size()) + " breakpoints");
  }
  if (boundary_values_.size() != breakpoints_.size()) {
    throw ValidationError("piecewise function needs one boundary value per breakpoint");
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (!std::isfinite(breakpoints_[i])) throw ValidationError("breakpoints must be finite");
    if (i > 0 && !(breakpoints_[i - 1] < breakpoints_[i])) {
      throw ValidationError("breakpoints must be strictly increasing");
    }
  }
  for (const auto& p : pieces_) {
    if (!p) throw ValidationError("piece evaluator is empty");
  }
}

Eval012 PiecewiseFn::eval(double x) const {
  if (!std::isfinite(x)) throw DomainError("piecewise function evaluated at a non-finite input");
  // First breakpoint >= x; its index is also the index of the left piece.
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto i = static_cast<std::size_t>(it - breakpoints_.begin());
  const Derivs012 d = pieces_[i](x);
  if (it != breakpoints_.end() && *it == x) {
    return {boundary_values_[i], d.d1, d.d2, true};
  }
  return {d.value, d.d1, d.d2, false};
}

double PiecewiseFn::distance_to_breakpoint(double x) const {
  if (breakpoints_.empty()) return std::numeric_limits<double>::infinity();
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  double best = std::numeric_limits<double>::infinity();
  if (it != breakpoints_.end()) best = *it - x;
  if (it != breakpoints_.begin()) best = std::min(best, x - *(it - 1));
  return best;
}

PiecewiseFn make_piecewise(std::vector<double> breakpoints, std::vector<Piece> pieces,
                           std::vector<double> boundary_values, std::string name) {
  return PiecewiseFn(std::move(breakpoints), std::move(pieces), std::move(boundary_values),
                     std::move(name));
}

Eval012 eval012(const PiecewiseFn& f, double x) { return f.eval(x); }

}  // namespace gdlab::calculus
