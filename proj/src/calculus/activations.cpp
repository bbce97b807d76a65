#include "gdlab/calculus/activations.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "gdlab/errors.hpp"

namespace gdlab::calculus {

namespace {

Derivs012 linear_piece(double x, double slope) { return {slope * x, slope, 0.0}; }

std::string format_alpha(double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "leaky_relu(%.17g)", alpha);
  return buf;
}

}  // namespace

PiecewiseFn identity_fn() {
  return make_piecewise({}, {[](double x) { return linear_piece(x, 1.0); }}, {}, "identity");
}

PiecewiseFn relu_fn() {
  return make_piecewise({0.0},
                        {[](double) { return Derivs012{0.0, 0.0, 0.0}; },
                         [](double x) { return linear_piece(x, 1.0); }},
                        {0.0}, "relu");
}

PiecewiseFn leaky_relu_fn(double alpha) {
  if (!std::isfinite(alpha)) throw ValidationError("leaky_relu slope must be finite");
  return make_piecewise({0.0},
                        {[alpha](double x) { return linear_piece(x, alpha); },
                         [](double x) { return linear_piece(x, 1.0); }},
                        {0.0}, format_alpha(alpha));
}

PiecewiseFn sigmoid_fn() {
  return make_piecewise({},
                        {[](double x) {
                          // Evaluate on the side where exp does not overflow.
                          const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                                    : std::exp(x) / (1.0 + std::exp(x));
                          const double d1 = s * (1.0 - s);
                          return Derivs012{s, d1, d1 * (1.0 - 2.0 * s)};
                        }},
                        {}, "sigmoid");
}

PiecewiseFn tanh_fn() {
  return make_piecewise({},
                        {[](double x) {
                          const double t = std::tanh(x);
                          const double d1 = 1.0 - t * t;
                          return Derivs012{t, d1, -2.0 * t * d1};
                        }},
                        {}, "tanh");
}

PiecewiseFn max1_fn() {
  return make_piecewise({1.0},
                        {[](double) { return Derivs012{1.0, 0.0, 0.0}; },
                         [](double x) { return linear_piece(x, 1.0); }},
                        {1.0}, "max1");
}

PiecewiseFn square_fn() {
  return make_piecewise({}, {[](double x) { return Derivs012{x * x, 2.0 * x, 2.0}; }}, {},
                        "square");
}

PiecewiseFn figure1_loss_fn() {
  const auto outer = [](double t) { return Derivs012{t * t, 2.0 * t, 2.0}; };
  const auto inner = [](double t) {
    const double t2 = t * t;
    return Derivs012{0.5 * t2 * t2 - 3.0 * t2 + 8.0, 2.0 * t2 * t - 6.0 * t, 6.0 * t2 - 6.0};
  };
  return make_piecewise({-2.0, 2.0}, {outer, inner, outer}, {4.0, 4.0}, "figure1");
}

PiecewiseFn activation_from_name(std::string_view key) {
  if (key == "relu") return relu_fn();
  if (key == "sigmoid") return sigmoid_fn();
  if (key == "tanh") return tanh_fn();
  if (key == "max1") return max1_fn();
  if (key == "identity") return identity_fn();
  if (key == "square") return square_fn();
  if (key == "leaky_relu") return leaky_relu_fn(0.01);
  constexpr std::string_view prefix = "leaky_relu(";
  if (key.starts_with(prefix) && key.ends_with(")")) {
    const std::string arg(key.substr(prefix.size(), key.size() - prefix.size() - 1));
    char* end = nullptr;
    const double alpha = std::strtod(arg.c_str(), &end);
    if (arg.empty() || end != arg.c_str() + arg.size()) {
      throw ValidationError("bad leaky_relu slope in '" + std::string(key) + "'");
    }
    return leaky_relu_fn(alpha);
  }
  throw ValidationError("unknown activation '" + std::string(key) + "'");
}

}  // namespace gdlab::calculus
