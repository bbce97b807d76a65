#pragma once

#include <memory>
#include <string_view>

#include "gdlab/objective/objective.hpp"

namespace gdlab::objective {

/// Two-layer scalar ReLU model f(x) = relu(t2 * relu(t1 * x)) fitted to the
/// points (0.9, 0.9) and (2.5, 2.5), the first sampled with probability p.
/// Its global minima are the branch t1 * t2 = 1, t1 > 0.
NetworkObjective appendix_c_objective(double p = 0.5);
network::NetworkSpec two_layer_relu_spec();
Dataset appendix_c_dataset(double p = 0.5);

/// 0.5 t^4 - 3 t^2 + 8 on [-2, 2], t^2 outside.
ScalarObjective figure1_objective();
/// L(t) = t^2.
ScalarObjective quadratic_objective();

/// "figure1", "quadratic" or "appendixC" (uses p). Throws ValidationError
/// for unknown names.
std::unique_ptr<Objective> make_named_objective(std::string_view name, double p = 0.5);

}  // namespace gdlab::objective
