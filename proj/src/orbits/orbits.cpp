#include "gdlab/orbits/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gdlab/dynamics/gd.hpp"
#include "gdlab/errors.hpp"

namespace gdlab::orbits {

ScalarMap diagonal_reduction(const objective::Objective& obj, double eta) {
  const Eigen::Index n = obj.n_params();
  return [&obj, eta, n](double x) {
    const auto j = obj.jet(Eigen::VectorXd::Constant(n, x));
    return MapEval{x - eta * j.grad(0), 1.0 - eta * j.hess.row(0).sum(), j.breakpoint_hits > 0};
  };
}

MapEval iterate_map(const ScalarMap& g, double x, int k) {
  MapEval out{x, 1.0, false};
  for (int i = 0; i < k; ++i) {
    const MapEval e = g(out.value);
    out.value = e.value;
    out.derivative *= e.derivative;
    out.on_breakpoint = out.on_breakpoint || e.on_breakpoint;
  }
  return out;
}

namespace {

double periodic_defect(const ScalarMap& g, double x, int k) { return iterate_map(g, x, k).value - x; }

PeriodicRoot refine_bracket(const ScalarMap& g, int k, double a, double b, double fa) {
  PeriodicRoot root{0.5 * (a + b), 0.0, false, a, b, false};
  double x = root.x;
  for (int it = 0; it < kMaxNewtonIterations; ++it) {
    const MapEval e = iterate_map(g, x, k);
    const double f = e.value - x;
    root.x = x;
    root.residual = std::abs(f);
    if (root.residual < kRootResidualTol) {
      root.converged = true;
      break;
    }
    if ((f < 0.0) == (fa < 0.0)) {
      a = x;
      fa = f;
    } else {
      b = x;
    }
    root.bracket_lo = std::min(a, b);
    root.bracket_hi = std::max(a, b);
    if (std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
    const double df = e.derivative - 1.0;
    double next = df != 0.0 ? x - f / df : std::numeric_limits<double>::quiet_NaN();
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (a + b);
    x = next;
  }
  return root;
}

// Boundary of the set {P == 0} between a zero point z and a nonzero point w.
double plateau_edge(const ScalarMap& g, int k, double z, double w) {
  for (int it = 0; it < 200 && std::abs(w - z) > 0.0; ++it) {
    const double mid = 0.5 * (z + w);
    if (mid == z || mid == w) break;
    if (periodic_defect(g, mid, k) == 0.0) {
      z = mid;
    } else {
      w = mid;
    }
  }
  return z;
}

bool is_primitive(const ScalarMap& g, double x, int k) {
  for (int d = 1; d < k; ++d) {
    if (k % d == 0 && std::abs(periodic_defect(g, x, d)) < kPrimitiveTol) return false;
  }
  return true;
}

}  // namespace

std::vector<PeriodicRoot> find_periodic_1d(const ScalarMap& g, int k, double lo, double hi,
                                           std::size_t grid_n) {
  if (k < 1) throw ValidationError("period must be at least 1");
  if (!(lo < hi)) throw ValidationError("search interval must satisfy lo < hi");
  if (grid_n < 2) throw ValidationError("root search grid needs at least two points");

  std::vector<double> xs(grid_n), fs(grid_n);
  for (std::size_t i = 0; i < grid_n; ++i) {
    xs[i] = i + 1 == grid_n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
    fs[i] = periodic_defect(g, xs[i], k);
  }

  std::vector<PeriodicRoot> raw;
  for (std::size_t i = 0; i < grid_n;) {
    if (fs[i] == 0.0) {
      std::size_t j = i;
      while (j + 1 < grid_n && fs[j + 1] == 0.0) ++j;
      if (j == i) {
        raw.push_back({xs[i], 0.0, true, xs[i], xs[i], false});
      } else {
        if (i > 0) {
          const double e = plateau_edge(g, k, xs[i], xs[i - 1]);
          raw.push_back({e, std::abs(periodic_defect(g, e, k)), true, xs[i - 1], xs[i], true});
        }
        if (j + 1 < grid_n) {
          const double e = plateau_edge(g, k, xs[j], xs[j + 1]);
          raw.push_back({e, std::abs(periodic_defect(g, e, k)), true, xs[j], xs[j + 1], true});
        }
      }
      i = j + 1;
      continue;
    }
    if (i + 1 < grid_n && fs[i + 1] != 0.0 && (fs[i] < 0.0) != (fs[i + 1] < 0.0)) {
      raw.push_back(refine_bracket(g, k, xs[i], xs[i + 1], fs[i]));
    }
    ++i;
  }

  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  std::vector<PeriodicRoot> out;
  for (const auto& r : raw) {
    if (!is_primitive(g, r.x, k)) continue;
    if (!out.empty() && std::abs(out.back().x - r.x) < kRootDedupTol) {
      if (r.residual < out.back().residual) out.back() = r;
      continue;
    }
    out.push_back(r);
  }
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    case Verdict::Neutral: return "neutral";
  }
  return "neutral";
}

Classification classify_multipliers(std::vector<std::complex<double>> multipliers) {
  std::sort(multipliers.begin(), multipliers.end(),
            [](const auto& a, const auto& b) { return std::abs(a) > std::abs(b); });
  Classification c;
  c.multipliers = std::move(multipliers);
  bool any_active = false, any_above = false, all_below = true;
  for (const auto& m : c.multipliers) {
    const bool neutral = std::abs(m - 1.0) < kNeutralMultiplierTol;
    c.neutral.push_back(neutral);
    if (neutral) continue;
    any_active = true;
    if (std::abs(m) > 1.0) any_above = true;
    if (!(std::abs(m) < 1.0)) all_below = false;
  }
  if (any_above) {
    c.verdict = Verdict::Unstable;
  } else if (any_active && all_below) {
    c.verdict = Verdict::Stable;
  } else {
    c.verdict = Verdict::Neutral;
  }
  return c;
}

Classification classify_orbit(const objective::Objective& obj,
                              const std::vector<Eigen::VectorXd>& points, double eta) {
  if (points.empty()) throw ValidationError("orbit has no points");
  const Eigen::Index n = obj.n_params();
  Eigen::MatrixXd product = Eigen::MatrixXd::Identity(n, n);
  bool reliable = true;
  for (const auto& p : points) {
    const auto jac = dynamics::gd_jacobian(obj, p, eta);
    reliable = reliable && jac.reliable;
    product = jac.jacobian * product;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(product, false);
  if (solver.info() != Eigen::Success) throw NumericFailure("multiplier eigenvalue solve failed");
  std::vector<std::complex<double>> ms(solver.eigenvalues().data(),
                                       solver.eigenvalues().data() + solver.eigenvalues().size());
  Classification c = classify_multipliers(std::move(ms));
  c.reliable = reliable;
  return c;
}

double orbit_residual(const objective::Objective& obj, const std::vector<Eigen::VectorXd>& points,
                      double eta) {
  double worst = 0.0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const auto next = dynamics::gd_map(obj, points[j], eta).theta;
    worst = std::max(worst, (next - points[(j + 1) % points.size()]).norm());
  }
  return worst;
}

namespace {

OrbitRecord make_record(const objective::Objective& obj, int k, double eta,
                        std::vector<Eigen::VectorXd> points) {
  OrbitRecord rec;
  rec.period = k;
  rec.eta = eta;
  rec.points = std::move(points);
  const Classification c = classify_orbit(obj, rec.points, eta);
  rec.multipliers = c.multipliers;
  rec.neutral = c.neutral;
  rec.verdict = c.verdict;
  rec.stable = c.verdict == Verdict::Stable;
  rec.reliable = c.reliable;
  rec.residual = orbit_residual(obj, rec.points, eta);
  return rec;
}

bool same_orbit(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b,
                double tol) {
  if (a.size() != b.size()) return false;
  for (const auto& p : a) {
    const bool found = std::any_of(b.begin(), b.end(), [&](const auto& q) { return (p - q).norm() < tol; });
    if (!found) return false;
  }
  return true;
}

}  // namespace

NdSearchResult find_periodic_nd(const objective::Objective& obj, int k, double eta,
                                const std::vector<Eigen::VectorXd>& seeds) {
  if (k < 1) throw ValidationError("period must be at least 1");
  NdSearchResult result;
  const Eigen::Index n = obj.n_params();
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    Eigen::VectorXd theta = seeds[s];
    if (theta.size() != n) throw DimensionError("seed has the wrong number of parameters");
    bool converged = false;
    std::string failure;
    for (int it = 0; it <= kMaxNewtonIterations; ++it) {
      Eigen::VectorXd cur = theta;
      Eigen::MatrixXd product = Eigen::MatrixXd::Identity(n, n);
      for (int j = 0; j < k; ++j) {
        const auto jet = obj.jet(cur);
        product = dynamics::gd_jacobian_from_hessian(jet.hess, eta) * product;
        cur = cur - eta * jet.grad;
      }
      const Eigen::VectorXd f = cur - theta;
      if (!f.allFinite()) {
        failure = "non-finite iterate";
        break;
      }
      if (f.norm() < kOrbitResidualTol) {
        converged = true;
        break;
      }
      if (it == kMaxNewtonIterations) {
        failure = "no convergence after " + std::to_string(kMaxNewtonIterations) + " Newton steps";
        break;
      }
      const Eigen::MatrixXd a = product - Eigen::MatrixXd::Identity(n, n);
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
      cod.setThreshold(1e-12);
      if (cod.rank() == 0) {
        failure = "singular Newton system";
        break;
      }
      theta -= cod.solve(f);
    }
    if (!converged) {
      result.diagnostics.push_back("seed " + std::to_string(s) + ": " + failure);
      continue;
    }
    std::vector<Eigen::VectorXd> points{theta};
    for (int j = 1; j < k; ++j) points.push_back(dynamics::gd_map(obj, points.back(), eta).theta);
    bool primitive = true;
    for (int d = 1; d < k; ++d) {
      if (k % d == 0 && (points[static_cast<std::size_t>(d)] - points[0]).norm() < kPrimitiveTol) primitive = false;
    }
    if (!primitive) {
      result.diagnostics.push_back("seed " + std::to_string(s) + ": converged to a lower period");
      continue;
    }
    const bool dup = std::any_of(result.orbits.begin(), result.orbits.end(), [&](const auto& o) {
      return same_orbit(o.points, points, kOrbitDedupTol);
    });
    if (dup) continue;
    result.orbits.push_back(make_record(obj, k, eta, std::move(points)));
  }
  return result;
}

std::vector<double> eta_grid(double eta_min, double eta_max, std::size_t eta_steps) {
  std::vector<double> grid;
  if (eta_steps == 0 || eta_min > eta_max) return grid;
  if (eta_steps == 1) return {eta_min};
  for (std::size_t i = 0; i < eta_steps; ++i) {
    grid.push_back(i + 1 == eta_steps
                       ? eta_max
                       : eta_min + (eta_max - eta_min) * static_cast<double>(i) / static_cast<double>(eta_steps - 1));
  }
  return grid;
}

std::vector<OrbitRecord> bifurcation_sweep(const objective::Objective& obj, const SweepConfig& config) {
  if (config.k_max < 1) throw ValidationError("k_max must be at least 1");
  const Eigen::Index n = obj.n_params();
  std::vector<OrbitRecord> records;
  for (double eta : eta_grid(config.eta_min, config.eta_max, config.eta_steps)) {
    const ScalarMap g = diagonal_reduction(obj, eta);
    for (int k = 1; k <= config.k_max; ++k) {
      std::vector<std::vector<double>> orbits;
      for (const auto& root : find_periodic_1d(g, k, config.search_lo, config.search_hi, config.grid_n)) {
        if (!root.converged) continue;
        const bool known = std::any_of(orbits.begin(), orbits.end(), [&](const auto& o) {
          return std::any_of(o.begin(), o.end(), [&](double p) { return std::abs(p - root.x) < kRootDedupTol * 100; });
        });
        if (known) continue;
        std::vector<double> pts{root.x};
        for (int j = 1; j < k; ++j) pts.push_back(g(pts.back()).value);
        orbits.push_back(pts);
        std::vector<Eigen::VectorXd> embedded;
        for (double p : pts) embedded.push_back(Eigen::VectorXd::Constant(n, p));
        records.push_back(make_record(obj, k, eta, std::move(embedded)));
      }
    }
  }
  return records;
}

}  // namespace gdlab::orbits
