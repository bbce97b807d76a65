#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gdlab/calculus/piecewise.hpp"
#include "gdlab/network/network.hpp"
#include "gdlab/objective/dataset.hpp"

namespace gdlab::objective {

/// Per-sample loss l(y, yhat) with its derivatives in yhat.
struct LossDerivs {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

/// A named per-sample loss. Registered kinds: "half_squared",
/// l(y, yhat) = 0.5 |y - yhat|^2.
class LossSpec {
 public:
  using Fn = std::function<LossDerivs(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat)>;

  /// Throws ValidationError for unregistered names.
  static LossSpec from_name(std::string_view name);
  static LossSpec half_squared();
  /// Adds or replaces a loss in the process-wide registry.
  static void register_loss(std::string name, Fn fn);

  const std::string& name() const { return name_; }
  LossDerivs operator()(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) const {
    return fn_(y, yhat);
  }

 private:
  LossSpec(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name_;
  Fn fn_;
};

/// Loss value with exact gradient and Hessian in theta.
struct LossJet {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  int breakpoint_hits = 0;
};

/// L(theta) = sum_i p_i l(y_i, f_theta(x_i)).
double empirical_loss(const network::NetworkSpec& spec, const Eigen::VectorXd& theta,
                      const Dataset& data, const LossSpec& loss);
LossJet loss_jet2(const network::NetworkSpec& spec, const Eigen::VectorXd& theta,
                  const Dataset& data, const LossSpec& loss);

/// Uniform 1/n average over `batch`; throws ValidationError for duplicate or
/// out-of-range indices. Indices are summed in ascending order.
double minibatch_loss(const network::NetworkSpec& spec, const Eigen::VectorXd& theta,
                      const Dataset& data, const LossSpec& loss, std::span<const std::size_t> batch);
LossJet minibatch_jet2(const network::NetworkSpec& spec, const Eigen::VectorXd& theta,
                       const Dataset& data, const LossSpec& loss, std::span<const std::size_t> batch);

/// A differentiable training objective as seen by the dynamics code.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Eigen::Index n_params() const = 0;
  /// Number of samples m eligible for mini-batches.
  virtual std::size_t n_samples() const = 0;
  virtual std::span<const double> weights() const = 0;

  virtual double loss(const Eigen::VectorXd& theta) const = 0;
  virtual LossJet jet(const Eigen::VectorXd& theta) const = 0;
  virtual LossJet batch_jet(const Eigen::VectorXd& theta, std::span<const std::size_t> batch) const = 0;
  /// Minimum distance of any activation input to a breakpoint.
  virtual double breakpoint_proximity(const Eigen::VectorXd& theta) const = 0;
};

class NetworkObjective final : public Objective {
 public:
  NetworkObjective(network::NetworkSpec spec, Dataset data, LossSpec loss);

  Eigen::Index n_params() const override { return static_cast<Eigen::Index>(spec_.n_params()); }
  std::size_t n_samples() const override { return data_.size(); }
  std::span<const double> weights() const override { return data_.weights(); }
  double loss(const Eigen::VectorXd& theta) const override;
  LossJet jet(const Eigen::VectorXd& theta) const override;
  LossJet batch_jet(const Eigen::VectorXd& theta, std::span<const std::size_t> batch) const override;
  double breakpoint_proximity(const Eigen::VectorXd& theta) const override;

  const network::NetworkSpec& spec() const { return spec_; }
  const Dataset& data() const { return data_; }

 private:
  network::NetworkSpec spec_;
  Dataset data_;
  LossSpec loss_;
};

/// One-parameter objective L(theta) = f(theta) for a piecewise analytic f.
/// Has a single pseudo-sample, so every batch is the full objective.
class ScalarObjective final : public Objective {
 public:
  explicit ScalarObjective(calculus::PiecewiseFn f);

  Eigen::Index n_params() const override { return 1; }
  std::size_t n_samples() const override { return 1; }
  std::span<const double> weights() const override { return {&unit_weight_, 1}; }
  double loss(const Eigen::VectorXd& theta) const override;
  LossJet jet(const Eigen::VectorXd& theta) const override;
  LossJet batch_jet(const Eigen::VectorXd& theta, std::span<const std::size_t> batch) const override;
  double breakpoint_proximity(const Eigen::VectorXd& theta) const override;

 private:
  calculus::PiecewiseFn f_;
  double unit_weight_ = 1.0;
};

}  // namespace gdlab::objective
