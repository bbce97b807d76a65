#include "gdlab/stability/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gdlab/dynamics/gd.hpp"
#include "gdlab/dynamics/linalg.hpp"
#include "gdlab/errors.hpp"

namespace gdlab::stability {

namespace {

double log_abs(double arg) {
  if (arg == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(arg));
}

double radius(const Eigen::Vector2d& theta) { return theta(0) * theta(0) + theta(1) * theta(1); }

}  // namespace

void StabilityConfig::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be positive");
}

double mu_of_r(double r, const StabilityConfig& config) {
  return log_abs(1.0 - config.eta * config.mean_curvature() * r);
}

double mu(const Eigen::Vector2d& theta, const StabilityConfig& config) {
  return mu_of_r(radius(theta), config);
}

double lambda_of_r(double r, const StabilityConfig& config, LambdaForm form) {
  const double eta_b = form == LambdaForm::Corrected ? config.eta : 1.0;
  double out = 0.0;
  if (config.p != 0.0) out += config.p * log_abs(1.0 - config.eta * (config.a * config.a) * r);
  if (config.p != 1.0) out += (1.0 - config.p) * log_abs(1.0 - eta_b * (config.b * config.b) * r);
  return out;
}

double lambda_sgd(const Eigen::Vector2d& theta, const StabilityConfig& config, LambdaForm form) {
  return lambda_of_r(radius(theta), config, form);
}

StabilityReport stability_report(const Eigen::Vector2d& theta, const StabilityConfig& config,
                                 LambdaForm form) {
  StabilityReport rep{theta, mu(theta, config), lambda_sgd(theta, config, form), false, false};
  rep.gd_stable = rep.mu < 0.0;
  rep.sgd_stable = rep.lambda < 0.0;
  return rep;
}

std::pair<double, double> radius_to_t1(double r) {
  if (!(r >= 2.0)) throw DomainError("minimum branch has t^2 + t^-2 >= 2");
  // s = t^2 solves s^2 - r s + 1 = 0; the small root is taken as 1/large to
  // avoid cancellation.
  const double big = 0.5 * (r + std::sqrt((r - 2.0) * (r + 2.0)));
  return {std::sqrt(1.0 / big), std::sqrt(big)};
}

namespace {

// t1 intervals of {t : t^2 + t^-2 in (r_lo, r_hi)}, r_lo may be <= 2.
void push_radius_band(double r_lo, double r_hi, std::vector<Interval>& out) {
  if (r_hi <= 2.0) return;
  const auto [hi_small, hi_big] = radius_to_t1(r_hi);
  if (r_lo <= 2.0) {
    out.push_back({hi_small, hi_big});
    return;
  }
  const auto [lo_small, lo_big] = radius_to_t1(r_lo);
  out.push_back({hi_small, lo_small});
  out.push_back({lo_big, hi_big});
}

void sort_arcs(std::vector<Interval>& arcs) {
  std::sort(arcs.begin(), arcs.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
}

}  // namespace

StableArcs stable_arcs(const StabilityConfig& config, LambdaForm form) {
  config.validate();
  StableArcs arcs;

  const double c = config.mean_curvature();
  if (c > 0.0) {
    push_radius_band(0.0, 2.0 / (config.eta * c), arcs.gd);
  } else {
    arcs.gd.push_back({0.0, std::numeric_limits<double>::infinity()});
  }

  const auto lam = [&](double r) { return lambda_of_r(r, config, form); };
  constexpr double kRMin = 2.0;
  constexpr std::size_t kGrid = 20000;
  std::vector<double> rs;
  rs.reserve(kGrid + 3);
  for (std::size_t i = 0; i <= kGrid; ++i) {
    rs.push_back(kRMin * std::pow(kArcRadiusMax / kRMin, static_cast<double>(i) / kGrid));
  }
  // Logarithmic singularities of lambda (value -inf) are always stable pockets.
  const double eta_b = form == LambdaForm::Corrected ? config.eta : 1.0;
  for (double s : {1.0 / (config.eta * config.a * config.a), 1.0 / (eta_b * config.b * config.b)}) {
    if (s > kRMin && s < kArcRadiusMax) rs.push_back(s);
  }
  std::sort(rs.begin(), rs.end());

  const auto bisect = [&](double lo, double hi) {
    const bool lo_neg = lam(lo) < 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      ((lam(mid) < 0.0) == lo_neg ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  bool inside = lam(rs.front()) < 0.0;
  double start = 0.0;  // band reaching down to the vertex r = 2
  for (std::size_t i = 1; i < rs.size(); ++i) {
    const bool neg = lam(rs[i]) < 0.0;
    if (neg == inside) continue;
    const double edge = bisect(rs[i - 1], rs[i]);
    if (inside) {
      push_radius_band(start, edge, arcs.sgd);
    } else {
      start = edge;
    }
    inside = neg;
  }
  if (inside) push_radius_band(start, kArcRadiusMax, arcs.sgd);
  sort_arcs(arcs.gd);
  sort_arcs(arcs.sgd);
  return arcs;
}

std::optional<Interval> principal_arc(const std::vector<Interval>& arcs) {
  for (const auto& a : arcs) {
    if (a.contains(1.0)) return a;
  }
  return std::nullopt;
}

bool arcs_contained(const std::vector<Interval>& inner, const std::vector<Interval>& outer) {
  return std::all_of(inner.begin(), inner.end(), [&](const Interval& i) {
    return std::any_of(outer.begin(), outer.end(), [&](const Interval& o) { return o.contains(i); });
  });
}

bool arcs_intersect(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (std::max(x.lo, y.lo) <= std::min(x.hi, y.hi)) return true;
  return false;
}

MinimumClassification classify_minimum_generic(const objective::Objective& obj,
                                               const Eigen::VectorXd& theta_star, double eta) {
  const auto jet = obj.jet(theta_star);
  const double g = jet.grad.norm();
  if (!(g < 1e-8)) {
    throw DomainError("classify_minimum_generic needs a critical point, |grad L| = " + std::to_string(g));
  }
  MinimumClassification out;
  out.reliable = jet.breakpoint_hits == 0;
  out.multipliers = dynamics::det_and_eigs(dynamics::gd_jacobian_from_hessian(jet.hess, eta)).eigenvalues;
  std::vector<std::complex<double>> ms(out.multipliers.begin(), out.multipliers.end());
  const auto c = orbits::classify_multipliers(std::move(ms));
  out.verdict = c.verdict;
  out.normal_multiplier = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < c.multipliers.size(); ++i) {
    if (!c.neutral[i]) {
      out.normal_multiplier = c.multipliers[i].real();
      break;
    }
  }
  return out;
}

}  // namespace gdlab::stability

namespace gdlab::stability {

double distance_to_minimum_branch(const Eigen::Vector2d& theta) {
  // Minimise over u = log t: coarse scan, then golden-section refinement.
  const auto dist2 = [&](double u) {
    const double t = std::exp(u);
    const double dx = theta(0) - t, dy = theta(1) - 1.0 / t;
    return dx * dx + dy * dy;
  };
  constexpr double kLo = -12.0, kHi = 12.0;
  constexpr int kScan = 4000;
  const double step = (kHi - kLo) / kScan;
  double best_u = kLo;
  double best = dist2(kLo);
  for (int i = 1; i <= kScan; ++i) {
    const double u = kLo + step * i;
    const double d = dist2(u);
    if (d < best) {
      best = d;
      best_u = u;
    }
  }
  double a = best_u - step, b = best_u + step;
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = dist2(c), fd = dist2(d);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = dist2(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = dist2(d);
    }
  }
  return std::sqrt(std::min({best, fc, fd}));
}

}  // namespace gdlab::stability
