#include "gdlab/objective/objective.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>

#include "gdlab/errors.hpp"

namespace gdlab::objective {

namespace {

LossDerivs half_squared_loss(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
  if (y.size() != yhat.size()) {
    throw DimensionError("target has length " + std::to_string(y.size()) +
                         ", network output has length " + std::to_string(yhat.size()));
  }
  const Eigen::VectorXd r = yhat - y;
  return {0.5 * r.squaredNorm(), r, Eigen::MatrixXd::Identity(r.size(), r.size())};
}

struct Registry {
  std::mutex mutex;
  std::map<std::string, LossSpec::Fn, std::less<>> fns{{"half_squared", half_squared_loss}};
};

Registry& registry() {
  static Registry r;
  return r;
}

void symmetrize(Eigen::MatrixXd& h) { h = 0.5 * (h + h.transpose()).eval(); }

// Adds w * l(y_i, f(x_i)) and its derivatives to acc.
void accumulate_sample(const network::NetworkSpec& spec, const Eigen::VectorXd& theta,
                       const Dataset& data, const LossSpec& loss, std::size_t i, double w,
                       LossJet& acc) {
  const auto out = network::forward_jet2(spec, theta, data.input(i));
  const LossDerivs ld = loss(data.target(i), out.value);
  Eigen::MatrixXd h = out.grad.transpose() * ld.hess * out.grad;
  for (std::size_t k = 0; k < out.hess.size(); ++k) {
    const double gk = ld.grad(static_cast<Eigen::Index>(k));
    if (gk != 0.0) h += gk * out.hess[k];
  }
  acc.value += w * ld.value;
  acc.grad += w * (out.grad.transpose() * ld.grad);
  acc.hess += w * h;
  acc.breakpoint_hits += out.breakpoint_hits;
}

LossJet zero_jet(Eigen::Index n) {
  return {0.0, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n), 0};
}

std::vector<std::size_t> checked_batch(std::span<const std::size_t> batch, std::size_t m) {
  if (batch.empty()) throw ValidationError("mini-batch must not be empty");
  std::vector<std::size_t> sorted(batch.begin(), batch.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.back() >= m) throw ValidationError("mini-batch index out of range");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("mini-batch indices must be distinct");
  }
  return sorted;
}

}  // namespace

LossSpec LossSpec::from_name(std::string_view name) {
  auto& reg = registry();
  std::lock_guard lock(reg.mutex);
  const auto it = reg.fns.find(name);
  if (it == reg.fns.end()) throw ValidationError("unknown loss '" + std::string(name) + "'");
  return LossSpec(it->first, it->second);
}

LossSpec LossSpec::half_squared() { return from_name("half_squared"); }

void LossSpec::register_loss(std::string name, Fn fn) {
  auto& reg = registry();
  std::lock_guard lock(reg.mutex);
  reg.fns[std::move(name)] = std::move(fn);
}

double empirical_loss(const network::NetworkSpec& spec, const Eigen::VectorXd& theta,
                      const Dataset& data, const LossSpec& loss) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total += data.weight(i) * loss(data.target(i), network::forward(spec, theta, data.input(i))).value;
  }
  return total;
}

LossJet loss_jet2(const network::NetworkSpec& spec, const Eigen::VectorXd& theta,
                  const Dataset& data, const LossSpec& loss) {
  LossJet acc = zero_jet(static_cast<Eigen::Index>(spec.n_params()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    accumulate_sample(spec, theta, data, loss, i, data.weight(i), acc);
  }
  symmetrize(acc.hess);
  return acc;
}

double minibatch_loss(const network::NetworkSpec& spec, const Eigen::VectorXd& theta,
                      const Dataset& data, const LossSpec& loss, std::span<const std::size_t> batch) {
  const auto sorted = checked_batch(batch, data.size());
  const double w = 1.0 / static_cast<double>(sorted.size());
  double total = 0.0;
  for (std::size_t i : sorted) {
    total += w * loss(data.target(i), network::forward(spec, theta, data.input(i))).value;
  }
  return total;
}

LossJet minibatch_jet2(const network::NetworkSpec& spec, const Eigen::VectorXd& theta,
                       const Dataset& data, const LossSpec& loss, std::span<const std::size_t> batch) {
  const auto sorted = checked_batch(batch, data.size());
  const double w = 1.0 / static_cast<double>(sorted.size());
  LossJet acc = zero_jet(static_cast<Eigen::Index>(spec.n_params()));
  for (std::size_t i : sorted) accumulate_sample(spec, theta, data, loss, i, w, acc);
  symmetrize(acc.hess);
  return acc;
}

NetworkObjective::NetworkObjective(network::NetworkSpec spec, Dataset data, LossSpec loss)
    : spec_(std::move(spec)), data_(std::move(data)), loss_(std::move(loss)) {
  if (static_cast<std::size_t>(data_.input_dim()) != spec_.input_size()) {
    throw DimensionError("dataset inputs have length " + std::to_string(data_.input_dim()) +
                         ", network expects " + std::to_string(spec_.input_size()));
  }
  if (static_cast<std::size_t>(data_.target_dim()) != spec_.output_size()) {
    throw DimensionError("dataset targets have length " + std::to_string(data_.target_dim()) +
                         ", network outputs " + std::to_string(spec_.output_size()));
  }
}

double NetworkObjective::loss(const Eigen::VectorXd& theta) const {
  return empirical_loss(spec_, theta, data_, loss_);
}

LossJet NetworkObjective::jet(const Eigen::VectorXd& theta) const {
  return loss_jet2(spec_, theta, data_, loss_);
}

LossJet NetworkObjective::batch_jet(const Eigen::VectorXd& theta,
                                    std::span<const std::size_t> batch) const {
  return minibatch_jet2(spec_, theta, data_, loss_, batch);
}

double NetworkObjective::breakpoint_proximity(const Eigen::VectorXd& theta) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data_.size(); ++i) {
    best = std::min(best, network::breakpoint_proximity(spec_, theta, data_.input(i)));
  }
  return best;
}

ScalarObjective::ScalarObjective(calculus::PiecewiseFn f) : f_(std::move(f)) {}

namespace {
void require_scalar(const Eigen::VectorXd& theta) {
  if (theta.size() != 1) throw DimensionError("scalar objective takes one parameter");
}
}  // namespace

double ScalarObjective::loss(const Eigen::VectorXd& theta) const {
  require_scalar(theta);
  return f_.eval(theta(0)).value;
}

LossJet ScalarObjective::jet(const Eigen::VectorXd& theta) const {
  require_scalar(theta);
  const auto e = f_.eval(theta(0));
  return {e.value, Eigen::VectorXd::Constant(1, e.d1), Eigen::MatrixXd::Constant(1, 1, e.d2),
          e.on_breakpoint ? 1 : 0};
}

LossJet ScalarObjective::batch_jet(const Eigen::VectorXd& theta,
                                   std::span<const std::size_t> batch) const {
  checked_batch(batch, 1);
  return jet(theta);
}

double ScalarObjective::breakpoint_proximity(const Eigen::VectorXd& theta) const {
  require_scalar(theta);
  return f_.distance_to_breakpoint(theta(0));
}

}  // namespace gdlab::objective
