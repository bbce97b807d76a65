#include "gdlab/objective/named.hpp"

#include <string>

#include "gdlab/calculus/activations.hpp"
#include "gdlab/errors.hpp"

namespace gdlab::objective {

network::NetworkSpec two_layer_relu_spec() {
  return network::NetworkSpec({network::DenseLayer{1, 1, calculus::relu_fn()},
                               network::DenseLayer{1, 1, calculus::relu_fn()}});
}

Dataset appendix_c_dataset(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("sampling probability p must lie in [0, 1]");
  std::vector<Eigen::VectorXd> xs{Eigen::VectorXd::Constant(1, 0.9), Eigen::VectorXd::Constant(1, 2.5)};
  std::vector<Eigen::VectorXd> ys = xs;
  return Dataset(std::move(xs), std::move(ys), {p, 1.0 - p});
}

NetworkObjective appendix_c_objective(double p) {
  return NetworkObjective(two_layer_relu_spec(), appendix_c_dataset(p), LossSpec::half_squared());
}

ScalarObjective figure1_objective() { return ScalarObjective(calculus::figure1_loss_fn()); }

ScalarObjective quadratic_objective() { return ScalarObjective(calculus::square_fn()); }

std::unique_ptr<Objective> make_named_objective(std::string_view name, double p) {
  if (name == "figure1") return std::make_unique<ScalarObjective>(figure1_objective());
  if (name == "quadratic") return std::make_unique<ScalarObjective>(quadratic_objective());
  if (name == "appendixC") return std::make_unique<NetworkObjective>(appendix_c_objective(p));
  throw ValidationError("unknown objective '" + std::string(name) + "'");
}

}  // namespace gdlab::objective
