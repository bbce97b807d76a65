#pragma once

#include <string>
#include <string_view>

#include "gdlab/calculus/piecewise.hpp"

namespace gdlab::calculus {

PiecewiseFn identity_fn();
PiecewiseFn relu_fn();
PiecewiseFn leaky_relu_fn(double alpha);
PiecewiseFn sigmoid_fn();
PiecewiseFn tanh_fn();
/// x -> max{1, x}
PiecewiseFn max1_fn();
/// x -> x^2, no breakpoints.
PiecewiseFn square_fn();

/// 0.5 t^4 - 3 t^2 + 8 on [-2, 2] and t^2 outside; C^1 with breakpoints at +-2.
PiecewiseFn figure1_loss_fn();

/// Builds an activation from its key: "relu", "leaky_relu", "leaky_relu(a)",
/// "sigmoid", "tanh", "max1", "identity", "square". Throws ValidationError
/// for unknown keys.
PiecewiseFn activation_from_name(std::string_view key);

}  // namespace gdlab::calculus
