#include "gdlab/dynamics/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "gdlab/calculus/jet2.hpp"
#include "gdlab/errors.hpp"

namespace gdlab::dynamics {

double lu_determinant(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ValidationError("determinant of a non-square matrix");
  Eigen::MatrixXd lu = a;
  const Eigen::Index n = lu.rows();
  double det = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot = k;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > std::abs(lu(pivot, k))) pivot = i;
    }
    if (lu(pivot, k) == 0.0) return 0.0;
    if (pivot != k) {
      lu.row(pivot).swap(lu.row(k));
      det = -det;
    }
    det *= lu(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double factor = lu(i, k) / lu(k, k);
      for (Eigen::Index j = k + 1; j < n; ++j) lu(i, j) -= factor * lu(k, j);
    }
  }
  return det;
}

std::vector<double> jacobi_eigenvalues(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ValidationError("eigenvalues of a non-square matrix");
  Eigen::MatrixXd m = 0.5 * (a + a.transpose());
  const Eigen::Index n = m.rows();
  const double tol = 1e-12 * std::max(1.0, m.norm());
  const auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_norm() >= tol; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        // Rotation angle zeroing m(p, q); the smaller root keeps |t| <= 1.
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        m(p, q) = 0.0;
        m(q, p) = 0.0;
      }
    }
  }
  if (off_norm() >= tol) throw NumericFailure("Jacobi eigenvalue iteration did not converge");
  std::vector<double> eig(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = m(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

DetEigs det_and_eigs(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ValidationError("det_and_eigs needs a square matrix");
  if (calculus::symmetry_defect(a) > 1e-9) {
    throw ValidationError("det_and_eigs needs a symmetric matrix");
  }
  return {lu_determinant(a), jacobi_eigenvalues(a)};
}

}  // namespace gdlab::dynamics
