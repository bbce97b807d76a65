#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gdlab/objective/objective.hpp"
#include "gdlab/orbits/orbits.hpp"

namespace gdlab::stability {

/// Two-point experiment: samples (a, a) and (b, b), the first drawn with
/// probability p, step-size eta.
struct StabilityConfig {
  double eta = 0.15;
  double p = 0.5;
  double a = 0.9;
  double b = 2.5;

  /// p a^2 + (1 - p) b^2
  double mean_curvature() const { return p * a * a + (1.0 - p) * b * b; }
  /// Throws ValidationError unless 0 <= p <= 1 and eta > 0.
  void validate() const;
};

enum class LambdaForm {
  /// eta multiplies both curvature terms.
  Corrected,
  /// eta is dropped from the second logarithm, as in the printed closed form.
  PaperLiteral,
};

/// log |1 - eta (p a^2 + (1 - p) b^2) r| with r = t1^2 + t2^2. Returns -inf
/// when the argument of the log is exactly zero.
double mu(const Eigen::Vector2d& theta, const StabilityConfig& config);
double mu_of_r(double r, const StabilityConfig& config);

/// p log |1 - eta a^2 r| + (1 - p) log |1 - eta b^2 r|. Terms with zero
/// weight are dropped.
double lambda_sgd(const Eigen::Vector2d& theta, const StabilityConfig& config,
                  LambdaForm form = LambdaForm::Corrected);
double lambda_of_r(double r, const StabilityConfig& config, LambdaForm form = LambdaForm::Corrected);

struct StabilityReport {
  Eigen::Vector2d theta;
  double mu = 0.0;
  double lambda = 0.0;
  bool gd_stable = false;
  bool sgd_stable = false;
};

StabilityReport stability_report(const Eigen::Vector2d& theta, const StabilityConfig& config,
                                 LambdaForm form = LambdaForm::Corrected);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double t) const { return lo <= t && t <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

/// Stable minima on the branch t2 = 1/t1, t1 > 0, as t1 intervals.
struct StableArcs {
  std::vector<Interval> gd;
  std::vector<Interval> sgd;
};

inline constexpr double kArcRadiusMax = 1e3;

/// GD arcs from the closed form r < 2 / (eta c) with r = t^2 + t^-2; SGD arcs
/// from the sign changes of lambda(r) on (2, 1e3], located on a log grid
/// that includes the two singular radii and refined by bisection.
StableArcs stable_arcs(const StabilityConfig& config, LambdaForm form = LambdaForm::Corrected);

/// t1 values on the minimum branch with t1^2 + t1^-2 = r (r >= 2), ascending.
std::pair<double, double> radius_to_t1(double r);

/// The interval containing t1 = 1 (the balanced minimum), if any.
std::optional<Interval> principal_arc(const std::vector<Interval>& arcs);

/// Whether every interval of `inner` is contained in some interval of `outer`.
bool arcs_contained(const std::vector<Interval>& inner, const std::vector<Interval>& outer);
bool arcs_intersect(const std::vector<Interval>& a, const std::vector<Interval>& b);

struct MinimumClassification {
  orbits::Verdict verdict = orbits::Verdict::Neutral;
  /// Eigenvalues of I - eta H_L, ascending.
  std::vector<double> multipliers;
  /// Largest-modulus multiplier not within 1e-8 of 1; NaN when none.
  double normal_multiplier = 0.0;
  bool reliable = true;
};

/// Stability of a critical point from the multipliers of I - eta H_L,
/// ignoring neutral (tangent) multipliers. Throws DomainError when
/// |grad L(theta*)| >= 1e-8.
MinimumClassification classify_minimum_generic(const objective::Objective& obj,
                                               const Eigen::VectorXd& theta_star, double eta);

}  // namespace gdlab::stability

namespace gdlab::stability {

/// Euclidean distance from theta to the branch {t1 t2 = 1, t1 > 0}.
double distance_to_minimum_branch(const Eigen::Vector2d& theta);

}  // namespace gdlab::stability
