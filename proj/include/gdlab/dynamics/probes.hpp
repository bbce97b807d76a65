#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gdlab/objective/objective.hpp"

namespace gdlab::dynamics {

/// Axis-aligned box [lo, hi]; one-dimensional boxes are intervals.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static Box interval(double lo, double hi);
  Eigen::Index dim() const { return lo.size(); }
  double diameter() const { return (hi - lo).norm(); }
  /// Throws ValidationError for mismatched or degenerate bounds.
  void validate() const;
};

/// Regular lattice with `n_per_axis` points per axis including both ends.
std::vector<Eigen::VectorXd> lattice(const Box& box, std::size_t n_per_axis);

inline constexpr double kCollapseImageDiameter = 1e-10;
inline constexpr double kCollapseRegionDiameter = 1e-2;

struct RegionImageResult {
  std::vector<Eigen::VectorXd> inputs;
  std::vector<Eigen::VectorXd> outputs;
  double region_diameter = 0.0;
  /// Largest pairwise distance among the image points.
  double image_diameter = 0.0;
  Eigen::VectorXd image_lo;
  Eigen::VectorXd image_hi;
  /// image diameter < 1e-10 while the region diameter > 1e-2.
  bool collapsed = false;
  int breakpoint_hits = 0;
};

/// Pushes a lattice through G_eta. A one-dimensional box uses n_samples
/// points; a d-dimensional box uses round(n_samples^(1/d)) per axis.
RegionImageResult region_image_probe(const objective::Objective& obj, const Box& region,
                                     double eta, std::size_t n_samples);

struct DetProbeResult {
  double eta = 0.0;
  std::size_t n_samples = 0;
  /// Samples with an activation input exactly on a breakpoint; excluded
  /// from the fractions.
  std::size_t breakpoint_samples = 0;
  std::vector<double> eps;
  /// fraction of samples with |det(I - eta H)| < eps[i]
  std::vector<double> fractions;
  std::vector<std::size_t> counts;
  /// Singular step-sizes closest to eta at samples below the smallest eps.
  std::vector<double> singular_eta_candidates;
};

/// Uniform samples in `box`; sample i draws from CounterRng(seed, i).
DetProbeResult det_probe(const objective::Objective& obj, const Box& box, double eta,
                         std::size_t n_samples, std::vector<double> eps_grid, std::uint64_t seed);

/// Least-squares slope of log(fraction) against log(eps) over the entries
/// with a positive fraction; NaN when fewer than two qualify.
double loglog_slope(const std::vector<double>& eps, const std::vector<double>& fractions);

/// Number of uniform samples in `box` whose breakpoint proximity is exactly
/// zero.
std::size_t count_breakpoint_samples(const objective::Objective& obj, const Box& box,
                                     std::size_t n_samples, std::uint64_t seed);

}  // namespace gdlab::dynamics
