#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gdlab/dynamics/rng.hpp"
#include "gdlab/objective/objective.hpp"

namespace gdlab::dynamics {

struct GDConfig {
  double eta = 0.1;
  /// When non-empty, step t uses schedule[t] instead of eta.
  std::vector<double> schedule;
  std::uint64_t rng_seed = 0;
  /// Set for SGD; unset means full-batch GD.
  std::optional<std::size_t> batch_size;
};

struct StepResult {
  Eigen::VectorXd theta;
  int breakpoint_hits = 0;
};

/// theta - eta * grad L(theta). Throws DomainError for negative or
/// non-finite eta.
StepResult gd_map(const objective::Objective& obj, const Eigen::VectorXd& theta, double eta);

struct SgdStepResult {
  Eigen::VectorXd theta;
  /// Ascending sample indices.
  std::vector<std::size_t> batch;
  int breakpoint_hits = 0;
};

/// Draws `batch_size` distinct indices, each successive draw proportional to
/// the remaining weights. Result is sorted. Throws ValidationError when
/// batch_size is 0 or exceeds the number of samples.
std::vector<std::size_t> sample_batch(std::span<const double> weights, std::size_t batch_size,
                                      CounterRng& rng);

SgdStepResult sgd_step(const objective::Objective& obj, const Eigen::VectorXd& theta, double eta,
                       std::size_t batch_size, CounterRng& rng);

struct JacobianResult {
  Eigen::MatrixXd jacobian;
  /// False when some activation input sat exactly on a breakpoint; the
  /// matrix then uses one-sided derivatives.
  bool reliable = true;
  int breakpoint_hits = 0;
};

/// I - eta * H_L(theta).
JacobianResult gd_jacobian(const objective::Objective& obj, const Eigen::VectorXd& theta, double eta);
Eigen::MatrixXd gd_jacobian_from_hessian(const Eigen::MatrixXd& hess, double eta);

/// Eigenvalues of |lambda| at or below this (relative to the Hessian norm)
/// count as zero and produce no singular step-size.
inline constexpr double kZeroEigenvalueTol = 1e-12;

/// {1 / lambda_i : lambda_i a nonzero eigenvalue of hess}, ascending and
/// deduplicated. Negative eigenvalues give negative entries.
std::vector<double> singular_stepsizes_from_hessian(const Eigen::MatrixXd& hess);

struct SingularStepsizes {
  std::vector<double> stepsizes;
  std::vector<double> eigenvalues;
  bool reliable = true;
};

SingularStepsizes singular_stepsizes(const objective::Objective& obj, const Eigen::VectorXd& theta);

struct TrajectoryPoint {
  std::size_t step = 0;
  Eigen::VectorXd theta;
  double loss = 0.0;
  double grad_norm = 0.0;
  int breakpoint_hits = 0;
  /// Step-size and batch of the update leaving this point; unset on the last.
  std::optional<double> eta;
  std::vector<std::size_t> batch;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  /// Set when an iterate became non-finite; points then ends at that iterate.
  bool diverged = false;
};

/// Runs `steps` updates from theta0 with GD, or SGD when config.batch_size is
/// set. Stops early, with `diverged` set, at the first non-finite iterate. SGD step t draws from CounterRng(config.rng_seed, t). Throws
/// ValidationError when a schedule is shorter than `steps`.
Trajectory iterate(const objective::Objective& obj, const Eigen::VectorXd& theta0,
                   const GDConfig& config, std::size_t steps);

struct ScheduleResult {
  Eigen::VectorXd theta;
  /// prod_t det(I - eta_t H_L(theta_t)) along the path.
  double det_product = 1.0;
  int breakpoint_hits = 0;
};

/// Applies G_{eta_T} o ... o G_{eta_1}.
ScheduleResult compose_schedule(const objective::Objective& obj, const Eigen::VectorXd& theta,
                                std::span<const double> schedule);

}  // namespace gdlab::dynamics
