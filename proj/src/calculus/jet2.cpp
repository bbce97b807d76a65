#include "gdlab/calculus/jet2.hpp"

#include <cmath>

#include "gdlab/errors.hpp"

namespace gdlab::calculus {

namespace {

void require_same_dim(const Jet2& a, const Jet2& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("jet dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  }
}

// u v' + v u', symmetric entry by entry since a*b + c*d == c*d + a*b exactly.
Eigen::MatrixXd sym_outer(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = u(i) * v(j) + v(i) * u(j);
  }
  return out;
}

Jet2 lift_derivs(const Derivs012& d, const Jet2& u, bool hit) {
  const Eigen::VectorXd& g = u.grad();
  Eigen::MatrixXd h = d.d1 * u.hess();
  if (d.d2 != 0.0) {
    // Written out: Eigen folds the scalar into one factor, which breaks symmetry.
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      for (Eigen::Index i = 0; i < g.size(); ++i) h(i, j) += d.d2 * (g(i) * g(j));
    }
  }
  return Jet2(d.value, d.d1 * g, std::move(h), hit || u.breakpoint_hit());
}

}  // namespace

Jet2::Jet2(double value, Eigen::VectorXd grad, Eigen::MatrixXd hess, bool breakpoint_hit)
    : value_(value), grad_(std::move(grad)), hess_(std::move(hess)), breakpoint_hit_(breakpoint_hit) {
  if (hess_.rows() != grad_.size() || hess_.cols() != grad_.size()) {
    throw DimensionError("jet Hessian must be n x n for a gradient of length n");
  }
}

Jet2 Jet2::constant(double value, Eigen::Index n) {
  return Jet2(value, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n));
}

Jet2 Jet2::variable(double value, Eigen::Index index, Eigen::Index n) {
  if (index < 0 || index >= n) throw DimensionError("seed index out of range");
  Jet2 out = constant(value, n);
  out.grad_(index) = 1.0;
  return out;
}

Jet2& Jet2::operator+=(const Jet2& other) {
  require_same_dim(*this, other);
  value_ += other.value_;
  grad_ += other.grad_;
  hess_ += other.hess_;
  breakpoint_hit_ = breakpoint_hit_ || other.breakpoint_hit_;
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& other) {
  require_same_dim(*this, other);
  value_ -= other.value_;
  grad_ -= other.grad_;
  hess_ -= other.hess_;
  breakpoint_hit_ = breakpoint_hit_ || other.breakpoint_hit_;
  return *this;
}

Jet2& Jet2::operator*=(double s) {
  value_ *= s;
  grad_ *= s;
  hess_ *= s;
  return *this;
}

Jet2& Jet2::add_product(const Jet2& a, const Jet2& b) {
  require_same_dim(*this, a);
  require_same_dim(a, b);
  const double av = a.value_, bv = b.value_;
  const Eigen::Index n = dim();
  const double* ag = a.grad_.data();
  const double* bg = b.grad_.data();
  for (Eigen::Index j = 0; j < n; ++j) {
    double* h = hess_.col(j).data();
    const double* ah = a.hess_.col(j).data();
    const double* bh = b.hess_.col(j).data();
    for (Eigen::Index i = 0; i < n; ++i) {
      h[i] += (ah[i] * bv + bh[i] * av) + (ag[i] * bg[j] + bg[i] * ag[j]);
    }
  }
  grad_ += a.grad_ * bv + b.grad_ * av;
  value_ += av * bv;
  breakpoint_hit_ = breakpoint_hit_ || a.breakpoint_hit_ || b.breakpoint_hit_;
  return *this;
}

Jet2& Jet2::add_param_product(double x_value, Eigen::Index index, const Jet2& z) {
  require_same_dim(*this, z);
  if (index < 0 || index >= dim()) throw DimensionError("seed index out of range");
  if (x_value != 0.0) hess_ += x_value * z.hess_;
  // row and column of the seed get z's gradient; (index,index) gets it twice
  hess_.row(index) += z.grad_.transpose();
  hess_.col(index) += z.grad_;
  grad_ += x_value * z.grad_;
  grad_(index) += z.value_;
  value_ += x_value * z.value_;
  breakpoint_hit_ = breakpoint_hit_ || z.breakpoint_hit_;
  return *this;
}

Jet2 jet2_add(const Jet2& a, const Jet2& b) {
  Jet2 out = a;
  out += b;
  return out;
}

Jet2 jet2_sub(const Jet2& a, const Jet2& b) {
  Jet2 out = a;
  out -= b;
  return out;
}

Jet2 jet2_mul(const Jet2& a, const Jet2& b) {
  require_same_dim(a, b);
  Eigen::MatrixXd h = a.hess() * b.value() + b.hess() * a.value();
  h += sym_outer(a.grad(), b.grad());
  Eigen::VectorXd g = a.grad() * b.value() + b.grad() * a.value();
  return Jet2(a.value() * b.value(), std::move(g), std::move(h),
              a.breakpoint_hit() || b.breakpoint_hit());
}

Jet2 jet2_scale(const Jet2& a, double s) {
  Jet2 out = a;
  out *= s;
  return out;
}

Jet2 jet2_negate(const Jet2& a) { return jet2_scale(a, -1.0); }

Jet2 jet2_lift(const PiecewiseFn& f, const Jet2& u) {
  const Eval012 e = f.eval(u.value());
  return lift_derivs({e.value, e.d1, e.d2}, u, e.on_breakpoint);
}

Jet2 jet2_exp(const Jet2& u) {
  const double e = std::exp(u.value());
  return lift_derivs({e, e, e}, u, false);
}

Jet2 jet2_reciprocal(const Jet2& u) {
  const double x = u.value();
  if (x == 0.0) throw DomainError("reciprocal of a zero jet");
  const double r = 1.0 / x;
  return lift_derivs({r, -r * r, 2.0 * r * r * r}, u, false);
}

double symmetry_defect(const Eigen::MatrixXd& h) {
  if (h.size() == 0) return 0.0;
  return (h - h.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace gdlab::calculus
