#include "gdlab/dynamics/gd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gdlab/dynamics/linalg.hpp"
#include "gdlab/errors.hpp"

namespace gdlab::dynamics {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void check_eta(double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw DomainError("step-size must be finite and nonnegative, got " + std::to_string(eta));
  }
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ (stream * kGolden + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t CounterRng::next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

StepResult gd_map(const objective::Objective& obj, const Eigen::VectorXd& theta, double eta) {
  check_eta(eta);
  const auto j = obj.jet(theta);
  return {theta - eta * j.grad, j.breakpoint_hits};
}

std::vector<std::size_t> sample_batch(std::span<const double> weights, std::size_t batch_size,
                                      CounterRng& rng) {
  const std::size_t m = weights.size();
  if (batch_size == 0 || batch_size > m) {
    throw ValidationError("batch size " + std::to_string(batch_size) + " not in 1.." + std::to_string(m));
  }
  std::vector<std::size_t> batch;
  std::vector<bool> taken(m, false);
  if (batch_size == m) {
    batch.resize(m);
    for (std::size_t i = 0; i < m; ++i) batch[i] = i;
    return batch;
  }
  for (std::size_t k = 0; k < batch_size; ++k) {
    double remaining = 0.0;
    std::size_t last_open = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (!taken[i]) {
        remaining += weights[i];
        last_open = i;
      }
    }
    std::size_t pick = last_open;
    if (remaining > 0.0) {
      const double u = rng.uniform() * remaining;
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (taken[i] || weights[i] == 0.0) continue;
        acc += weights[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    } else {
      // Only zero-weight samples remain; take them uniformly.
      std::vector<std::size_t> open;
      for (std::size_t i = 0; i < m; ++i)
        if (!taken[i]) open.push_back(i);
      pick = open[static_cast<std::size_t>(rng.uniform() * static_cast<double>(open.size()))];
    }
    taken[pick] = true;
    batch.push_back(pick);
  }
  std::sort(batch.begin(), batch.end());
  return batch;
}

SgdStepResult sgd_step(const objective::Objective& obj, const Eigen::VectorXd& theta, double eta,
                       std::size_t batch_size, CounterRng& rng) {
  check_eta(eta);
  auto batch = sample_batch(obj.weights(), batch_size, rng);
  const auto j = obj.batch_jet(theta, batch);
  return {theta - eta * j.grad, std::move(batch), j.breakpoint_hits};
}

Eigen::MatrixXd gd_jacobian_from_hessian(const Eigen::MatrixXd& hess, double eta) {
  return Eigen::MatrixXd::Identity(hess.rows(), hess.cols()) - eta * hess;
}

JacobianResult gd_jacobian(const objective::Objective& obj, const Eigen::VectorXd& theta, double eta) {
  check_eta(eta);
  const auto j = obj.jet(theta);
  return {gd_jacobian_from_hessian(j.hess, eta), j.breakpoint_hits == 0, j.breakpoint_hits};
}

std::vector<double> singular_stepsizes_from_hessian(const Eigen::MatrixXd& hess) {
  const auto eig = jacobi_eigenvalues(hess);
  double scale = 1.0;
  for (double l : eig) scale = std::max(scale, std::abs(l));
  std::vector<double> out;
  for (double l : eig) {
    if (std::abs(l) <= kZeroEigenvalueTol * scale) continue;
    out.push_back(1.0 / l);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) {
                          return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
                        }),
            out.end());
  return out;
}

SingularStepsizes singular_stepsizes(const objective::Objective& obj, const Eigen::VectorXd& theta) {
  const auto j = obj.jet(theta);
  return {singular_stepsizes_from_hessian(j.hess), jacobi_eigenvalues(j.hess), j.breakpoint_hits == 0};
}

Trajectory iterate(const objective::Objective& obj, const Eigen::VectorXd& theta0,
                   const GDConfig& config, std::size_t steps) {
  if (!config.schedule.empty() && config.schedule.size() < steps) {
    throw ValidationError("schedule has " + std::to_string(config.schedule.size()) +
                          " step-sizes for " + std::to_string(steps) + " steps");
  }
  Trajectory traj;
  traj.points.reserve(steps + 1);
  Eigen::VectorXd theta = theta0;
  for (std::size_t t = 0; t <= steps; ++t) {
    if (!theta.allFinite()) {
      // Diverged: keep the offending iterate and stop.
      const double nan = std::numeric_limits<double>::quiet_NaN();
      traj.points.push_back({t, theta, nan, nan, 0, std::nullopt, {}});
      traj.diverged = true;
      break;
    }
    const auto full = obj.jet(theta);
    TrajectoryPoint pt{t, theta, full.value, full.grad.norm(), full.breakpoint_hits, std::nullopt, {}};
    if (t < steps) {
      const double eta = config.schedule.empty() ? config.eta : config.schedule[t];
      check_eta(eta);
      pt.eta = eta;
      if (config.batch_size) {
        CounterRng rng(config.rng_seed, t);
        auto step = sgd_step(obj, theta, eta, *config.batch_size, rng);
        pt.batch = std::move(step.batch);
        theta = std::move(step.theta);
      } else {
        theta = theta - eta * full.grad;
      }
    }
    traj.points.push_back(std::move(pt));
  }
  return traj;
}

ScheduleResult compose_schedule(const objective::Objective& obj, const Eigen::VectorXd& theta,
                                std::span<const double> schedule) {
  ScheduleResult out{theta, 1.0, 0};
  for (double eta : schedule) {
    check_eta(eta);
    const auto j = obj.jet(out.theta);
    out.det_product *= lu_determinant(gd_jacobian_from_hessian(j.hess, eta));
    out.breakpoint_hits += j.breakpoint_hits;
    out.theta = out.theta - eta * j.grad;
  }
  return out;
}

}  // namespace gdlab::dynamics
