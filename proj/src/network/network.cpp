#include "gdlab/network/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gdlab/calculus/jet2.hpp"
#include "gdlab/errors.hpp"

namespace gdlab::network {

using calculus::Jet2;
using calculus::PiecewiseFn;

int TiedLayer::shared_count() const {
  if (tie_pattern.empty()) return 0;
  return *std::max_element(tie_pattern.begin(), tie_pattern.end()) + 1;
}

double AttentionLayer::effective_scale() const {
  return scale.value_or(1.0 / std::sqrt(static_cast<double>(seq_len)));
}

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

struct Trace {
  int breakpoint_hits = 0;
  double min_proximity = std::numeric_limits<double>::infinity();

  void record(const PiecewiseFn& f, double u, bool hit) {
    if (hit) ++breakpoint_hits;
    if (f.has_breakpoints()) min_proximity = std::min(min_proximity, f.distance_to_breakpoint(u));
  }
};

struct DoubleOps {
  using Scalar = double;

  Scalar constant(double c) const { return c; }
  Scalar activate(const PiecewiseFn& f, const Scalar& u, Trace& trace) const {
    const auto e = f.eval(u);
    trace.record(f, u, e.on_breakpoint);
    return e.value;
  }
  Scalar exp(const Scalar& u) const { return std::exp(u); }
  Scalar reciprocal(const Scalar& u) const { return 1.0 / u; }
  void fma(Scalar& acc, const Scalar& a, const Scalar& b) const { acc += a * b; }
  void fma_param(Scalar& acc, const Eigen::VectorXd& theta, std::size_t i, const Scalar& z) const {
    acc += theta(static_cast<Eigen::Index>(i)) * z;
  }
  static double value(const Scalar& u) { return u; }
};

struct JetOps {
  using Scalar = Jet2;
  Eigen::Index n = 0;

  Scalar constant(double c) const { return Jet2::constant(c, n); }
  Scalar activate(const PiecewiseFn& f, const Scalar& u, Trace& trace) const {
    Jet2 out = calculus::jet2_lift(f, u);
    // Only the hit at this node is counted, not the propagated flag.
    trace.record(f, u.value(), f.eval(u.value()).on_breakpoint);
    return out;
  }
  Scalar exp(const Scalar& u) const { return calculus::jet2_exp(u); }
  Scalar reciprocal(const Scalar& u) const { return calculus::jet2_reciprocal(u); }
  void fma(Scalar& acc, const Scalar& a, const Scalar& b) const { acc.add_product(a, b); }
  void fma_param(Scalar& acc, const Eigen::VectorXd& theta, std::size_t i, const Scalar& z) const {
    const auto idx = static_cast<Eigen::Index>(i);
    acc.add_param_product(theta(idx), idx, z);
  }
  static double value(const Scalar& u) { return u.value(); }
};

template <class Ops>
using Vec = std::vector<typename Ops::Scalar>;

template <class Ops>
Vec<Ops> matvec_act(const Ops& ops, const Eigen::VectorXd& theta, int out_dim, int in_dim, const Vec<Ops>& z,
                    const PiecewiseFn& act, Trace& trace, auto&& weight) {
  Vec<Ops> out;
  out.reserve(static_cast<std::size_t>(out_dim));
  for (int r = 0; r < out_dim; ++r) {
    auto acc = ops.constant(0.0);
    for (int c = 0; c < in_dim; ++c) ops.fma_param(acc, theta, weight(r, c), z[static_cast<std::size_t>(c)]);
    out.push_back(ops.activate(act, acc, trace));
  }
  return out;
}

// Row-major d x d matrix times column-stacked sequence X (d x n).
template <class Ops>
Vec<Ops> project(const Ops& ops, const Eigen::VectorXd& theta, std::size_t offset, int d, int n,
                 const Vec<Ops>& x) {
  Vec<Ops> out;
  out.reserve(static_cast<std::size_t>(d * n));
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < d; ++r) {
      auto acc = ops.constant(0.0);
      for (int s = 0; s < d; ++s) {
        ops.fma_param(acc, theta, offset + static_cast<std::size_t>(r * d + s),
                      x[static_cast<std::size_t>(i * d + s)]);
      }
      out.push_back(std::move(acc));
    }
  }
  return out;
}

template <class Ops>
std::vector<Vec<Ops>> softmax_weights(const Ops& ops, const AttentionLayer& layer,
                                      const Eigen::VectorXd& theta, std::size_t offset,
                                      const Vec<Ops>& x) {
  const int d = layer.model_dim;
  const int n = layer.seq_len;
  const auto dd = static_cast<std::size_t>(d * d);
  const Vec<Ops> q = project(ops, theta, offset, d, n, x);
  const Vec<Ops> k = project(ops, theta, offset + dd, d, n, x);
  const double scale = layer.effective_scale();
  std::vector<Vec<Ops>> weights(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vec<Ops> scores;
    scores.reserve(static_cast<std::size_t>(n));
    double max_score = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      auto acc = ops.constant(0.0);
      for (int r = 0; r < d; ++r) {
        ops.fma(acc, q[static_cast<std::size_t>(i * d + r)], k[static_cast<std::size_t>(j * d + r)]);
      }
      acc = acc * scale;
      max_score = std::max(max_score, Ops::value(acc));
      scores.push_back(std::move(acc));
    }
    auto total = ops.constant(0.0);
    for (auto& s : scores) {
      s = ops.exp(s - ops.constant(max_score));
      total += s;
    }
    const auto inv = ops.reciprocal(total);
    for (auto& s : scores) s = s * inv;
    weights[static_cast<std::size_t>(i)] = std::move(scores);
  }
  return weights;
}

template <class Ops>
Vec<Ops> attention(const Ops& ops, const AttentionLayer& layer, const Eigen::VectorXd& theta,
                   std::size_t offset, const Vec<Ops>& x) {
  const int d = layer.model_dim;
  const int n = layer.seq_len;
  const auto dd = static_cast<std::size_t>(d * d);
  const auto weights = softmax_weights(ops, layer, theta, offset, x);
  const Vec<Ops> v = project(ops, theta, offset + 2 * dd, d, n, x);
  Vec<Ops> out;
  out.reserve(static_cast<std::size_t>(d * n));
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < d; ++r) {
      auto acc = ops.constant(0.0);
      for (int j = 0; j < n; ++j) {
        ops.fma(acc, weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                v[static_cast<std::size_t>(j * d + r)]);
      }
      out.push_back(std::move(acc));
    }
  }
  return out;
}

void check_inputs(const NetworkSpec& spec, const Eigen::VectorXd& theta, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(theta.size()) != spec.n_params()) {
    throw DimensionError("parameter vector has length " + std::to_string(theta.size()) +
                         ", network expects " + std::to_string(spec.n_params()));
  }
  if (static_cast<std::size_t>(x.size()) != spec.input_size()) {
    throw DimensionError("input has length " + std::to_string(x.size()) + ", network expects " +
                         std::to_string(spec.input_size()));
  }
}

template <class Ops>
Vec<Ops> run(const NetworkSpec& spec, const Eigen::VectorXd& theta, const Eigen::VectorXd& x,
             const Ops& ops, Trace& trace) {
  check_inputs(spec, theta, x);
  Vec<Ops> z;
  z.reserve(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) z.push_back(ops.constant(x(i)));

  for (std::size_t li = 0; li < spec.layers().size(); ++li) {
    const std::size_t offset = spec.layout()[li].offset;
    z = std::visit(
        Overloaded{
            [&](const DenseLayer& l) {
              return matvec_act(ops, theta, l.out_dim, l.in_dim, z, l.activation, trace,
                                [&](int r, int c) {
                                  return offset + static_cast<std::size_t>(r * l.in_dim + c);
                                });
            },
            [&](const TiedLayer& l) {
              return matvec_act(ops, theta, l.out_dim, l.in_dim, z, l.activation, trace,
                                [&](int r, int c) {
                                  const int tie = l.tie_pattern[static_cast<std::size_t>(r * l.in_dim + c)];
                                  return offset + static_cast<std::size_t>(tie);
                                });
            },
            [&](const AttentionLayer& l) { return attention(ops, l, theta, offset, z); },
        },
        spec.layers()[li]);
  }
  return z;
}

}  // namespace

std::size_t layer_input_size(const LayerSpec& layer) {
  return std::visit(Overloaded{
                        [](const DenseLayer& l) { return static_cast<std::size_t>(l.in_dim); },
                        [](const TiedLayer& l) { return static_cast<std::size_t>(l.in_dim); },
                        [](const AttentionLayer& l) {
                          return static_cast<std::size_t>(l.model_dim * l.seq_len);
                        },
                    },
                    layer);
}

std::size_t layer_output_size(const LayerSpec& layer) {
  return std::visit(Overloaded{
                        [](const DenseLayer& l) { return static_cast<std::size_t>(l.out_dim); },
                        [](const TiedLayer& l) { return static_cast<std::size_t>(l.out_dim); },
                        [](const AttentionLayer& l) {
                          return static_cast<std::size_t>(l.model_dim * l.seq_len);
                        },
                    },
                    layer);
}

std::size_t layer_param_count(const LayerSpec& layer) {
  return std::visit(Overloaded{
                        [](const DenseLayer& l) {
                          return static_cast<std::size_t>(l.out_dim * l.in_dim);
                        },
                        [](const TiedLayer& l) { return static_cast<std::size_t>(l.shared_count()); },
                        [](const AttentionLayer& l) {
                          return static_cast<std::size_t>(3 * l.model_dim * l.model_dim);
                        },
                    },
                    layer);
}

NetworkSpec::NetworkSpec(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ValidationError("network needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& layer = layers_[i];
    const std::string where = "layer " + std::to_string(i);
    std::visit(Overloaded{
                   [&](const DenseLayer& l) {
                     if (l.out_dim <= 0 || l.in_dim <= 0) {
                       throw ValidationError(where + ": dimensions must be positive");
                     }
                   },
                   [&](const TiedLayer& l) {
                     if (l.out_dim <= 0 || l.in_dim <= 0) {
                       throw ValidationError(where + ": dimensions must be positive");
                     }
                     if (l.tie_pattern.size() != static_cast<std::size_t>(l.out_dim * l.in_dim)) {
                       throw ValidationError(where + ": tie pattern must cover every matrix entry");
                     }
                     const int count = l.shared_count();
                     std::vector<bool> used(static_cast<std::size_t>(std::max(count, 0)), false);
                     for (int t : l.tie_pattern) {
                       if (t < 0) throw ValidationError(where + ": negative tie index");
                       used[static_cast<std::size_t>(t)] = true;
                     }
                     if (std::find(used.begin(), used.end(), false) != used.end()) {
                       throw ValidationError(where + ": shared parameter indices must be contiguous from 0");
                     }
                   },
                   [&](const AttentionLayer& l) {
                     if (l.model_dim <= 0 || l.seq_len <= 0) {
                       throw ValidationError(where + ": dimensions must be positive");
                     }
                     if (l.scale && !std::isfinite(*l.scale)) {
                       throw ValidationError(where + ": attention scale must be finite");
                     }
                   },
               },
               layer);
    if (i > 0 && layer_output_size(layers_[i - 1]) != layer_input_size(layer)) {
      throw ValidationError(where + ": input size " + std::to_string(layer_input_size(layer)) +
                            " does not match previous output size " +
                            std::to_string(layer_output_size(layers_[i - 1])));
    }
    const std::size_t count = layer_param_count(layer);
    layout_.push_back({n_params_, count, std::nullopt});
    n_params_ += count;
  }
}

std::size_t NetworkSpec::input_size() const { return layer_input_size(layers_.front()); }
std::size_t NetworkSpec::output_size() const { return layer_output_size(layers_.back()); }

Eigen::VectorXd forward(const NetworkSpec& spec, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& x) {
  Trace trace;
  const auto out = run(spec, theta, x, DoubleOps{}, trace);
  return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Jet2Output forward_jet2(const NetworkSpec& spec, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& x) {
  Trace trace;
  const auto n = static_cast<Eigen::Index>(spec.n_params());
  const auto out = run(spec, theta, x, JetOps{n}, trace);
  Jet2Output result;
  const auto m = static_cast<Eigen::Index>(out.size());
  result.value.resize(m);
  result.grad.resize(m, n);
  result.hess.reserve(out.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    const Jet2& j = out[static_cast<std::size_t>(k)];
    result.value(k) = j.value();
    result.grad.row(k) = j.grad().transpose();
    result.hess.push_back(j.hess());
  }
  result.breakpoint_hits = trace.breakpoint_hits;
  return result;
}

double breakpoint_proximity(const NetworkSpec& spec, const Eigen::VectorXd& theta,
                            const Eigen::VectorXd& x) {
  Trace trace;
  run(spec, theta, x, DoubleOps{}, trace);
  return trace.min_proximity;
}

Eigen::MatrixXd attention_weights(const AttentionLayer& layer,
                                  const Eigen::Ref<const Eigen::VectorXd>& layer_params,
                                  const Eigen::VectorXd& x) {
  if (layer_params.size() != static_cast<Eigen::Index>(layer_param_count(layer)) ||
      x.size() != static_cast<Eigen::Index>(layer_input_size(layer))) {
    throw DimensionError("attention parameters or input have the wrong length");
  }
  const Eigen::VectorXd theta = layer_params;
  std::vector<double> xs(x.data(), x.data() + x.size());
  const auto w = softmax_weights(DoubleOps{}, layer, theta, 0, xs);
  const auto n = static_cast<Eigen::Index>(layer.seq_len);
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

}  // namespace gdlab::network
