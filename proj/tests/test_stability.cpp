#include "doctest.h"

#include <cmath>
#include <limits>

#include "gdlab/errors.hpp"
#include "gdlab/objective/named.hpp"
#include "gdlab/stability/stability.hpp"
#include "oracles.hpp"

using namespace gdlab;
using namespace gdlab::stability;

namespace {

// Hand-written exponents as functions of t1 on the branch t2 = 1/t1.
double lambda_ref(double t, double eta, double p) {
  const double r = t * t + 1.0 / (t * t);
  return p * std::log(std::abs(1 - eta * 0.81 * r)) + (1 - p) * std::log(std::abs(1 - eta * 6.25 * r));
}

}  // namespace

TEST_CASE("mu values") {
  const StabilityConfig c{0.15, 0.5};
  CHECK(c.mean_curvature() == doctest::Approx(3.53));
  CHECK(mu({1, 1}, c) == doctest::Approx(std::log(0.059)).epsilon(1e-12));
  CHECK(mu({1, 1}, c) == doctest::Approx(-2.8302).epsilon(1e-4));
  const StabilityConfig tiny{1e-12, 0.5};
  CHECK(mu({1, 1}, tiny) < 0.0);
  CHECK(mu({1, 1}, tiny) > -1e-10);
  const StabilityConfig exact{0.5, 0.5, 1.0, 1.0};
  CHECK(mu_of_r(2.0, exact) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("lambda values") {
  const StabilityConfig c{0.15, 0.5};
  CHECK(lambda_sgd({1, 1}, c) == doctest::Approx(0.5 * std::log(0.757) + 0.5 * std::log(0.875)).epsilon(1e-12));
  const StabilityConfig d{0.3, 0.58};
  CHECK(lambda_sgd({1, 1}, d) == doctest::Approx(0.58 * std::log(0.514) + 0.42 * std::log(2.75)).epsilon(1e-12));
  CHECK(lambda_sgd({1, 1}, d) == doctest::Approx(0.0389).epsilon(1e-3));
  CHECK(lambda_sgd({1, 1}, d) > 0.0);
  for (double r : {2.0, 2.7, 5.0}) {
    const StabilityConfig one{0.2, 1.0};
    CHECK(lambda_of_r(r, one) == std::log(std::abs(1 - 0.2 * 0.81 * r)));
    CHECK(lambda_of_r(r, one) == mu_of_r(r, one));
    const StabilityConfig zero{0.2, 0.0};
    CHECK(lambda_of_r(r, zero) == mu_of_r(r, zero));
  }
  // the literal variant leaves eta out of the second logarithm
  CHECK(lambda_of_r(2.0, c, LambdaForm::PaperLiteral) ==
        doctest::Approx(0.5 * std::log(0.757) + 0.5 * std::log(std::abs(1 - 12.5))));
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS((StabilityConfig{0.1, 1.5}.validate()), ValidationError);
  CHECK_THROWS_AS((StabilityConfig{0.0, 0.5}.validate()), ValidationError);
  CHECK_NOTHROW((StabilityConfig{0.1, 0.0}.validate()));
}

TEST_CASE("radius to t1") {
  const auto [a, b] = radius_to_t1(2.0);
  CHECK(a == doctest::Approx(1.0));
  CHECK(b == doctest::Approx(1.0));
  const auto [lo, hi] = radius_to_t1(4.25);
  CHECK(lo == doctest::Approx(0.5));
  CHECK(hi == doctest::Approx(2.0));
  CHECK_THROWS_AS(radius_to_t1(1.5), DomainError);
}

TEST_CASE("arcs at eta 0.15, p 0.5") {
  const auto arcs = stable_arcs({0.15, 0.5});
  REQUIRE(arcs.gd.size() == 1);
  CHECK(std::abs(arcs.gd[0].lo - 0.5353) < 1e-3);
  CHECK(std::abs(arcs.gd[0].hi - 1.8679) < 1e-3);
  // closed form: t^2 + t^-2 = 2 / (eta c)
  const double R = 2.0 / (0.15 * 3.53);
  const double s = (R + std::sqrt(R * R - 4)) / 2;
  CHECK(arcs.gd[0].hi == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
  const auto principal = principal_arc(arcs.sgd);
  REQUIRE(principal);
  CHECK(std::abs(principal->lo - 0.678) < 1e-2);
  CHECK(std::abs(principal->hi - 1.475) < 1e-2);
  CHECK(principal->lo > arcs.gd[0].lo);
  CHECK(principal->hi < arcs.gd[0].hi);
  // oracle: sign changes of the hand-written lambda on a dense grid
  const auto roots = oracle::scan_roots([](double t) { return lambda_ref(t, 0.15, 0.5); }, 0.2, 4.0);
  std::vector<double> edges;
  for (const auto& a : arcs.sgd)
    for (double e : {a.lo, a.hi})
      if (e > 0.2 && e < 4.0) edges.push_back(e);
  REQUIRE(edges.size() == roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) CHECK(edges[i] == doctest::Approx(roots[i]).epsilon(1e-9));
  for (const auto& a : arcs.sgd) CHECK(lambda_ref(0.5 * (a.lo + a.hi), 0.15, 0.5) < 0.0);
}

TEST_CASE("arcs at eta 0.3, p 0.58") {
  const auto arcs = stable_arcs({0.3, 0.58});
  REQUIRE(arcs.gd.size() == 1);
  CHECK(std::abs(arcs.gd[0].lo - 0.823) < 1e-2);
  CHECK(std::abs(arcs.gd[0].hi - 1.215) < 1e-2);
  CHECK_FALSE(arcs_intersect(arcs.gd, arcs.sgd));
  CHECK_FALSE(principal_arc(arcs.sgd));
  CHECK_FALSE(arcs.sgd.empty());
}

TEST_CASE("arcs in the small step limit") {
  const auto arcs = stable_arcs({1e-6, 0.5});
  REQUIRE(arcs.gd.size() == 1);
  REQUIRE(arcs.sgd.size() == 1);
  CHECK(arcs.gd[0].lo < 1e-2);
  CHECK(arcs.gd[0].hi > 1e2);
  CHECK(arcs.sgd[0].contains(Interval{0.05, 20.0}));
}

TEST_CASE("interval helpers") {
  const std::vector<Interval> outer{{0.5, 2.0}};
  const std::vector<Interval> inner{{0.7, 1.5}};
  const std::vector<Interval> far{{3.0, 4.0}};
  CHECK(arcs_contained(inner, outer));
  CHECK_FALSE(arcs_contained(far, outer));
  CHECK(arcs_intersect(inner, outer));
  CHECK_FALSE(arcs_intersect(far, outer));
  CHECK(principal_arc(inner)->lo == 0.7);
  CHECK_FALSE(principal_arc(far));
}

TEST_CASE("classify_minimum_generic") {
  const auto obj = objective::appendix_c_objective(0.5);
  Eigen::VectorXd one(2);
  one << 1, 1;
  const auto a = classify_minimum_generic(obj, one, 0.15);
  CHECK(a.verdict == orbits::Verdict::Stable);
  CHECK(a.normal_multiplier == doctest::Approx(-0.059));
  CHECK(mu({1, 1}, {0.15, 0.5}) < 0.0);
  const auto b = classify_minimum_generic(obj, one, 0.3);
  CHECK(b.verdict == orbits::Verdict::Unstable);
  CHECK(b.normal_multiplier == doctest::Approx(-1.118));
  CHECK(mu({1, 1}, {0.3, 0.5}) > 0.0);
  const auto q = classify_minimum_generic(objective::quadratic_objective(), Eigen::VectorXd::Zero(1), 0.9);
  CHECK(q.verdict == orbits::Verdict::Stable);
  CHECK(q.normal_multiplier == doctest::Approx(-0.8));
  Eigen::VectorXd off(2);
  off << 1.2, 1.2;
  CHECK_THROWS_AS(classify_minimum_generic(obj, off, 0.1), DomainError);
}

TEST_CASE("distance to the minimum branch") {
  CHECK(distance_to_minimum_branch({1, 1}) == doctest::Approx(0.0).scale(1.0));
  CHECK(distance_to_minimum_branch({2, 0.5}) < 1e-12);
  for (const Eigen::Vector2d p : {Eigen::Vector2d(2, 2), Eigen::Vector2d(0.3, 1.1), Eigen::Vector2d(1.5, 0.2)}) {
    double best = 1e300;
    for (int i = 1; i <= 400000; ++i) {
      const double t = 0.01 * std::pow(1e4, i / 400000.0);
      best = std::min(best, std::hypot(p(0) - t, p(1) - 1 / t));
    }
    CHECK(distance_to_minimum_branch(p) == doctest::Approx(best).epsilon(1e-6));
  }
}
