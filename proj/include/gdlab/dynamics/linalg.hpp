#pragma once

#include <vector>

#include <Eigen/Dense>

namespace gdlab::dynamics {

struct DetEigs {
  double determinant = 0.0;
  /// Ascending.
  std::vector<double> eigenvalues;
};

/// Determinant by LU with partial pivoting.
double lu_determinant(const Eigen::MatrixXd& a);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, iterated
/// until the off-diagonal Frobenius norm drops below 1e-12 (relative to the
/// matrix norm when that exceeds 1). Ascending order.
std::vector<double> jacobi_eigenvalues(const Eigen::MatrixXd& a);

/// Both of the above. Throws ValidationError if the input is not square or
/// has a symmetry defect above 1e-9.
DetEigs det_and_eigs(const Eigen::MatrixXd& a);

}  // namespace gdlab::dynamics
