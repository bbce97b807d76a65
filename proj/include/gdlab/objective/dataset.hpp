#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gdlab::objective {

/// Input/target pairs with sampling weights p_i >= 0 summing to one.
class Dataset {
 public:
  /// Throws ValidationError for empty data, ragged dimensions, negative
  /// weights, or weights whose sum differs from 1 by more than 1e-12.
  Dataset(std::vector<Eigen::VectorXd> inputs, std::vector<Eigen::VectorXd> targets,
          std::vector<double> weights);

  /// Weights 1/m.
  static Dataset uniform(std::vector<Eigen::VectorXd> inputs, std::vector<Eigen::VectorXd> targets);

  std::size_t size() const { return inputs_.size(); }
  const Eigen::VectorXd& input(std::size_t i) const { return inputs_.at(i); }
  const Eigen::VectorXd& target(std::size_t i) const { return targets_.at(i); }
  double weight(std::size_t i) const { return weights_.at(i); }
  std::span<const double> weights() const { return weights_; }
  Eigen::Index input_dim() const { return inputs_.front().size(); }
  Eigen::Index target_dim() const { return targets_.front().size(); }

 private:
  std::vector<Eigen::VectorXd> inputs_;
  std::vector<Eigen::VectorXd> targets_;
  std::vector<double> weights_;
};

/// CSV with a header naming columns x*, y* and optionally "weight". Without a
/// weight column the samples are weighted uniformly.
Dataset load_dataset_csv(const std::filesystem::path& path);

}  // namespace gdlab::objective
