#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gdlab/calculus/piecewise.hpp"

namespace gdlab::network {

/// Bias-free fully connected layer z -> act(W z), W row-major (out x in).
struct DenseLayer {
  int out_dim = 0;
  int in_dim = 0;
  calculus::PiecewiseFn activation;
};

/// Dense layer whose matrix entries share parameters: entry (r, c) of W is
/// shared[tie_pattern[r * in_dim + c]]. A 1-D convolution is a tie pattern of
/// shifted rows.
struct TiedLayer {
  int out_dim = 0;
  int in_dim = 0;
  std::vector<int> tie_pattern;
  calculus::PiecewiseFn activation;

  int shared_count() const;
};

/// Single-head softmax attention over a sequence of `seq_len` columns of
/// height `model_dim`, stored column-stacked. With Q = Wq X, K = Wk X,
/// V = Wv X, position i attends with weights softmax_j(scale * <q_i, k_j>)
/// and outputs sum_j a_ij v_j. Parameters are Wq, Wk, Wv, each row-major.
struct AttentionLayer {
  int model_dim = 0;
  int seq_len = 0;
  /// Defaults to 1/sqrt(seq_len) when unset.
  std::optional<double> scale;

  double effective_scale() const;
};

using LayerSpec = std::variant<DenseLayer, TiedLayer, AttentionLayer>;

std::size_t layer_input_size(const LayerSpec& layer);
std::size_t layer_output_size(const LayerSpec& layer);
std::size_t layer_param_count(const LayerSpec& layer);

/// Where one layer's distinct parameters live inside theta.
struct LayerOffset {
  std::size_t offset = 0;
  std::size_t count = 0;
  /// Reserved for bias parameters; every layer here is bias-free.
  std::optional<std::size_t> bias_offset;
};

class NetworkSpec {
 public:
  /// Throws ValidationError when adjacent dimensions do not chain or a tie
  /// pattern is malformed.
  explicit NetworkSpec(std::vector<LayerSpec> layers);

  const std::vector<LayerSpec>& layers() const { return layers_; }
  const std::vector<LayerOffset>& layout() const { return layout_; }
  std::size_t n_params() const { return n_params_; }
  std::size_t input_size() const;
  std::size_t output_size() const;

 private:
  std::vector<LayerSpec> layers_;
  std::vector<LayerOffset> layout_;
  std::size_t n_params_ = 0;
};

struct Jet2Output {
  Eigen::VectorXd value;
  /// output_size x n_params
  Eigen::MatrixXd grad;
  /// One n_params x n_params Hessian per output component.
  std::vector<Eigen::MatrixXd> hess;
  int breakpoint_hits = 0;
};

/// Throws DimensionError for a theta or x of the wrong length.
Eigen::VectorXd forward(const NetworkSpec& spec, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& x);

/// Exact parameter derivatives by propagating Jet2 seeds through every layer.
Jet2Output forward_jet2(const NetworkSpec& spec, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& x);

/// Smallest distance from any activation input to a breakpoint of its
/// activation; +inf when no activation has breakpoints.
double breakpoint_proximity(const NetworkSpec& spec, const Eigen::VectorXd& theta,
                            const Eigen::VectorXd& x);

/// Softmax weight matrix (seq_len x seq_len, rows sum to one) of an attention
/// layer for the given layer parameters and column-stacked input.
Eigen::MatrixXd attention_weights(const AttentionLayer& layer,
                                  const Eigen::Ref<const Eigen::VectorXd>& layer_params,
                                  const Eigen::VectorXd& x);

}  // namespace gdlab::network
