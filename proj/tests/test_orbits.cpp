#include "doctest.h"

#include <cmath>

#include "gdlab/dynamics/gd.hpp"
#include "gdlab/errors.hpp"
#include "gdlab/objective/named.hpp"
#include "gdlab/orbits/orbits.hpp"
#include "oracles.hpp"

using namespace gdlab;
using namespace gdlab::orbits;

namespace {

Eigen::VectorXd v(std::initializer_list<double> xs) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

// Closed form of the diagonal map on x > 0, written out by hand.
double g_ref(double x, double eta) { return x + 3.53 * eta * x * (1.0 - x * x); }

std::vector<double> xs_of(const std::vector<PeriodicRoot>& roots) {
  std::vector<double> out;
  for (const auto& r : roots) out.push_back(r.x);
  return out;
}

}  // namespace

TEST_CASE("diagonal reduction matches the closed form") {
  const auto obj = objective::appendix_c_objective(0.5);
  for (double eta : {0.1, 0.25, 0.325}) {
    const auto g = diagonal_reduction(obj, eta);
    for (double x : {0.3, 0.9, 1.0, 1.4}) {
      const auto e = g(x);
      CHECK(e.value == doctest::Approx(g_ref(x, eta)).epsilon(1e-14));
      CHECK(e.derivative == doctest::Approx(1 + 3.53 * eta * (1 - 3 * x * x)).epsilon(1e-13));
    }
    CHECK(g(-0.3).value == -0.3);
  }
  const auto g = diagonal_reduction(obj, 0.325);
  const auto two = iterate_map(g, 0.9, 2);
  CHECK(two.value == doctest::Approx(g_ref(g_ref(0.9, 0.325), 0.325)));
  const double d1 = 1 + 3.53 * 0.325 * (1 - 3 * 0.81);
  const double y = g_ref(0.9, 0.325);
  CHECK(two.derivative == doctest::Approx(d1 * (1 + 3.53 * 0.325 * (1 - 3 * y * y))));
}

TEST_CASE("fixed points of the diagonal map") {
  const auto obj = objective::appendix_c_objective(0.5);
  for (double eta : {0.05, 0.15, 0.27}) {
    const auto roots = find_periodic_1d(diagonal_reduction(obj, eta), 1, -0.5, 2.0, 2001);
    const auto xs = xs_of(roots);
    REQUIRE(xs.size() == 2);
    CHECK(std::abs(xs[0]) < 1e-12);
    CHECK(xs[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(roots[0].plateau_edge);
    CHECK(roots[1].converged);
    CHECK(roots[1].residual < kRootResidualTol);
  }
}

TEST_CASE("period two roots") {
  const auto obj = objective::appendix_c_objective(0.5);
  CHECK(find_periodic_1d(diagonal_reduction(obj, 0.2), 2, 0.5, 1.5, 4000).empty());
  const auto roots = find_periodic_1d(diagonal_reduction(obj, 0.325), 2, 0.5, 1.5, 4000);
  REQUIRE(roots.size() == 2);
  // oracle: bisection on the hand-written g^2(x) - x, excluding the fixed point 1
  const auto p2 = [](double x) { return g_ref(g_ref(x, 0.325), 0.325) - x; };
  std::vector<double> ref;
  for (double r : oracle::scan_roots(p2, 0.5, 1.5))
    if (std::abs(r - 1.0) > 1e-6) ref.push_back(r);
  REQUIRE(ref.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(roots[static_cast<std::size_t>(i)].x == doctest::Approx(ref[static_cast<std::size_t>(i)]).epsilon(1e-10));
    CHECK(roots[static_cast<std::size_t>(i)].x > 0.6);
    CHECK(roots[static_cast<std::size_t>(i)].x < 1.4);
  }
  CHECK(g_ref(roots[0].x, 0.325) == doctest::Approx(roots[1].x).epsilon(1e-10));
  CHECK_THROWS(find_periodic_1d(diagonal_reduction(obj, 0.325), 0, 0.5, 1.5, 100));
}

TEST_CASE("classify fixed point at one") {
  const auto obj = objective::appendix_c_objective(0.5);
  const std::vector<Eigen::VectorXd> fp{v({1, 1})};
  const auto a = classify_orbit(obj, fp, 0.2);
  CHECK(a.verdict == Verdict::Stable);
  REQUIRE(a.multipliers.size() == 2);
  // decreasing modulus: the neutral tangent multiplier 1 comes first
  CHECK(a.neutral[0]);
  CHECK(a.multipliers[0].real() == doctest::Approx(1.0));
  CHECK(a.multipliers[1].real() == doctest::Approx(-0.412));
  const auto b = classify_orbit(obj, fp, 0.3);
  CHECK(b.verdict == Verdict::Unstable);
  CHECK(b.multipliers[0].real() == doctest::Approx(-1.118));
  const auto c = classify_orbit(obj, fp, 1e-6);
  CHECK(c.verdict == Verdict::Stable);
  const double normal = c.neutral[0] ? c.multipliers[1].real() : c.multipliers[0].real();
  CHECK(normal < 1.0);
  CHECK(normal > 0.99);
  CHECK(classify_multipliers({{1.0, 0.0}}).verdict == Verdict::Neutral);
  CHECK(classify_multipliers({{0.0, 1.5}, {0.2, 0}}).verdict == Verdict::Unstable);
  CHECK(std::string(to_string(Verdict::Stable)) == "stable");
}

TEST_CASE("find_periodic_nd") {
  const auto obj = objective::appendix_c_objective(0.5);
  const auto fp = find_periodic_nd(obj, 1, 0.1, {v({1.1, 0.95})});
  REQUIRE(fp.orbits.size() == 1);
  const auto& p = fp.orbits[0].points[0];
  CHECK(std::abs(p(0) * p(1) - 1.0) < 1e-10);
  CHECK(fp.orbits[0].residual < 1e-10);
  CHECK(fp.orbits[0].neutral.size() == 2);

  const auto frozen = find_periodic_nd(obj, 1, 0.0, {v({0.3, 1.7})});
  REQUIRE(frozen.orbits.size() == 1);
  CHECK(frozen.orbits[0].points[0] == v({0.3, 1.7}));

  const auto c2 = find_periodic_nd(obj, 2, 0.325, {v({0.8, 0.8})});
  REQUIRE(c2.orbits.size() == 1);
  const auto roots = find_periodic_1d(diagonal_reduction(obj, 0.325), 2, 0.5, 1.5, 4000);
  const auto& pts = c2.orbits[0].points;
  REQUIRE(pts.size() == 2);
  const double lo = std::min(pts[0](0), pts[1](0));
  CHECK(lo == doctest::Approx(roots[0].x).epsilon(1e-9));
  CHECK(pts[0](0) == doctest::Approx(pts[0](1)).epsilon(1e-12));
  CHECK(c2.orbits[0].stable);
  CHECK(orbit_residual(obj, pts, 0.325) < 1e-10);
  // a fixed point is not a primitive 2-cycle
  const auto lower = find_periodic_nd(obj, 2, 0.325, {v({1.0, 1.0})});
  CHECK(lower.orbits.empty());
  CHECK_FALSE(lower.diagnostics.empty());
}

TEST_CASE("eta grid") {
  CHECK(eta_grid(0.1, 0.2, 0).empty());
  CHECK(eta_grid(0.3, 0.2, 5).empty());
  const auto g = eta_grid(0.1, 0.2, 3);
  REQUIRE(g.size() == 3);
  CHECK(g.front() == 0.1);
  CHECK(g.back() == 0.2);
  CHECK(eta_grid(0.1, 0.1, 1) == std::vector<double>{0.1});
}

TEST_CASE("bifurcation sweep") {
  const auto obj = objective::appendix_c_objective(0.5);
  SweepConfig low{0.05, 0.28, 24, 2, 0.25, 1.75, 2000};
  for (const auto& r : bifurcation_sweep(obj, low)) {
    CHECK(r.period == 1);
    CHECK(r.stable);
    CHECK(r.points[0](0) == doctest::Approx(1.0));
  }
  SweepConfig high{0.325, 0.325, 1, 2, 0.25, 1.75, 2000};
  bool k1_unstable = false, k2_stable = false;
  for (const auto& r : bifurcation_sweep(obj, high)) {
    if (r.period == 1 && std::abs(r.points[0](0) - 1.0) < 1e-9) k1_unstable = !r.stable;
    if (r.period == 2) k2_stable = r.stable;
  }
  CHECK(k1_unstable);
  CHECK(k2_stable);
  SweepConfig empty{0.3, 0.2, 10, 2, 0.25, 1.75, 2000};
  CHECK(bifurcation_sweep(obj, empty).empty());
}
