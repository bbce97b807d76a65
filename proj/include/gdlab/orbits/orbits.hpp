#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gdlab/objective/objective.hpp"

namespace gdlab::orbits {

/// Value and derivative of a scalar map at a point.
struct MapEval {
  double value = 0.0;
  double derivative = 0.0;
  bool on_breakpoint = false;
};

using ScalarMap = std::function<MapEval(double)>;

/// g(x) = x - eta * dL/dtheta_0 at theta = (x, ..., x), with derivative
/// 1 - eta * sum_j H_0j. For objectives symmetric under permuting the
/// parameters this is G_eta restricted to the diagonal.
ScalarMap diagonal_reduction(const objective::Objective& obj, double eta);

/// g^k(x) with its derivative by the chain rule.
MapEval iterate_map(const ScalarMap& g, double x, int k);

inline constexpr double kRootResidualTol = 1e-12;
inline constexpr double kRootDedupTol = 1e-8;
inline constexpr double kPrimitiveTol = 1e-6;
inline constexpr int kMaxNewtonIterations = 100;

struct PeriodicRoot {
  double x = 0.0;
  /// |g^k(x) - x|
  double residual = 0.0;
  /// False when Newton did not reach the residual tolerance; then only the
  /// bracket is trustworthy.
  bool converged = false;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// Edge of an interval on which g^k(x) == x identically (e.g. a dead ReLU
  /// region where every point is fixed).
  bool plateau_edge = false;
};

/// Roots of P(x) = g^k(x) - x in [lo, hi] with primitive period k: sign
/// changes on a grid of grid_n points, refined by bracketed Newton to
/// |P| < 1e-12 and deduplicated within 1e-8. Intervals where P vanishes
/// identically contribute only their edges. Ascending.
std::vector<PeriodicRoot> find_periodic_1d(const ScalarMap& g, int k, double lo, double hi,
                                           std::size_t grid_n);

enum class Verdict { Stable, Unstable, Neutral };

const char* to_string(Verdict v);

inline constexpr double kNeutralMultiplierTol = 1e-8;

struct Classification {
  /// Eigenvalues of D(G^k) around the orbit, sorted by decreasing modulus.
  std::vector<std::complex<double>> multipliers;
  /// multipliers[i] within 1e-8 of 1 (directions tangent to a manifold of
  /// fixed points); not used for the verdict.
  std::vector<bool> neutral;
  Verdict verdict = Verdict::Neutral;
  /// False when an orbit point sits on a breakpoint.
  bool reliable = true;
};

/// Verdict from multipliers alone: stable when every non-neutral multiplier
/// has modulus < 1, unstable when one exceeds 1, neutral otherwise.
Classification classify_multipliers(std::vector<std::complex<double>> multipliers);

/// Multipliers are the eigenvalues of prod_j (I - eta H_L(points[j])),
/// taken in orbit order.
Classification classify_orbit(const objective::Objective& obj,
                              const std::vector<Eigen::VectorXd>& points, double eta);

struct OrbitRecord {
  int period = 1;
  double eta = 0.0;
  std::vector<Eigen::VectorXd> points;
  std::vector<std::complex<double>> multipliers;
  std::vector<bool> neutral;
  Verdict verdict = Verdict::Neutral;
  bool stable = false;
  bool reliable = true;
  /// max_j |G(points[j]) - points[(j + 1) mod k]|
  double residual = 0.0;
};

/// max_j |G_eta(points[j]) - points[(j + 1) mod k]|.
double orbit_residual(const objective::Objective& obj, const std::vector<Eigen::VectorXd>& points,
                      double eta);

inline constexpr double kOrbitResidualTol = 1e-10;
inline constexpr double kOrbitDedupTol = 1e-6;

struct NdSearchResult {
  std::vector<OrbitRecord> orbits;
  /// One line per skipped seed.
  std::vector<std::string> diagnostics;
};

/// Newton on F(theta) = G^k(theta) - theta with Jacobian
/// prod_j (I - eta H_L(theta_j)) - I, solved in the minimum-norm least
/// squares sense so that manifolds of periodic points are handled.
NdSearchResult find_periodic_nd(const objective::Objective& obj, int k, double eta,
                                const std::vector<Eigen::VectorXd>& seeds);

struct SweepConfig {
  double eta_min = 0.05;
  double eta_max = 0.4;
  std::size_t eta_steps = 100;
  int k_max = 2;
  double search_lo = 0.25;
  double search_hi = 1.75;
  std::size_t grid_n = 4000;
};

/// eta_steps points from eta_min to eta_max inclusive; empty when
/// eta_steps == 0 or eta_min > eta_max.
std::vector<double> eta_grid(double eta_min, double eta_max, std::size_t eta_steps);

/// Orbits of the diagonal reduction for every eta on the grid and every
/// period up to k_max, embedded on the diagonal and classified with the full
/// Jacobian. Output is ordered by eta, then period, then smallest point.
std::vector<OrbitRecord> bifurcation_sweep(const objective::Objective& obj, const SweepConfig& config);

}  // namespace gdlab::orbits
