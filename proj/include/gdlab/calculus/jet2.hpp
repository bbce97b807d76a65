#pragma once

#include <Eigen/Dense>

#include "gdlab/calculus/piecewise.hpp"

namespace gdlab::calculus {

/// Second-order forward-mode value over n parameters: value, gradient and a
/// dense symmetric Hessian.
///
/// Every operation builds the Hessian from symmetric terms only (scalar
/// multiples of symmetric matrices and sums u*v' + v*u'), so the stored matrix
/// is exactly symmetric in floating point.
class Jet2 {
 public:
  Jet2() = default;
  Jet2(double value, Eigen::VectorXd grad, Eigen::MatrixXd hess, bool breakpoint_hit = false);

  static Jet2 constant(double value, Eigen::Index n);
  /// Seed for parameter `index`: gradient e_index, zero Hessian.
  static Jet2 variable(double value, Eigen::Index index, Eigen::Index n);

  double value() const { return value_; }
  const Eigen::VectorXd& grad() const { return grad_; }
  const Eigen::MatrixXd& hess() const { return hess_; }
  Eigen::Index dim() const { return grad_.size(); }
  bool breakpoint_hit() const { return breakpoint_hit_; }

  Jet2& operator+=(const Jet2& other);
  Jet2& operator-=(const Jet2& other);
  Jet2& operator*=(double s);

  /// this += a * b without temporaries.
  Jet2& add_product(const Jet2& a, const Jet2& b);
  /// this += x * z where x is parameter `index` with value `x_value`.
  Jet2& add_param_product(double x_value, Eigen::Index index, const Jet2& z);

 private:
  double value_ = 0.0;
  Eigen::VectorXd grad_;
  Eigen::MatrixXd hess_;
  bool breakpoint_hit_ = false;
};

Jet2 jet2_add(const Jet2& a, const Jet2& b);
Jet2 jet2_sub(const Jet2& a, const Jet2& b);
Jet2 jet2_mul(const Jet2& a, const Jet2& b);
Jet2 jet2_scale(const Jet2& a, double s);
Jet2 jet2_negate(const Jet2& a);

/// Second-order chain rule f(u): value f(u), gradient f'(u) grad u,
/// Hessian f'(u) hess u + f''(u) grad u grad u'. Propagates the breakpoint flag.
Jet2 jet2_lift(const PiecewiseFn& f, const Jet2& u);

Jet2 jet2_exp(const Jet2& u);
/// 1/u; throws DomainError at u == 0.
Jet2 jet2_reciprocal(const Jet2& u);

inline Jet2 operator+(const Jet2& a, const Jet2& b) { return jet2_add(a, b); }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return jet2_sub(a, b); }
inline Jet2 operator-(const Jet2& a) { return jet2_negate(a); }
inline Jet2 operator*(const Jet2& a, const Jet2& b) { return jet2_mul(a, b); }
inline Jet2 operator*(const Jet2& a, double s) { return jet2_scale(a, s); }
inline Jet2 operator*(double s, const Jet2& a) { return jet2_scale(a, s); }

/// max |H - H'| over entries.
double symmetry_defect(const Eigen::MatrixXd& h);

}  // namespace gdlab::calculus
