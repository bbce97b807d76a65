#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "gdlab/dynamics/gd.hpp"
#include "gdlab/dynamics/linalg.hpp"
#include "gdlab/dynamics/probes.hpp"
#include "gdlab/dynamics/rng.hpp"
#include "gdlab/errors.hpp"
#include "gdlab/objective/named.hpp"
#include "oracles.hpp"

using namespace gdlab;
using namespace gdlab::dynamics;

namespace {

Eigen::VectorXd v(std::initializer_list<double> xs) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("gd_map on figure1") {
  const auto obj = objective::figure1_objective();
  CHECK(gd_map(obj, v({2.1}), 0.5).theta(0) == 0.0);
  CHECK(gd_map(obj, v({2.7}), 0.5).theta(0) == 0.0);
  CHECK(gd_map(obj, v({2.1}), 0.25).theta(0) == doctest::Approx(1.05).epsilon(1e-15));
  CHECK(gd_map(obj, v({0.3}), 0.0).theta(0) == 0.3);
  CHECK_THROWS_AS(gd_map(obj, v({1}), -0.1), DomainError);
  CHECK_THROWS_AS(gd_map(obj, v({1}), std::nan("")), DomainError);
}

TEST_CASE("counter rng is replayable") {
  CounterRng a(42, 3), b(42, 3), c(42, 4);
  std::vector<std::uint64_t> xs;
  for (int i = 0; i < 5; ++i) xs.push_back(a.next_u64());
  for (int i = 0; i < 5; ++i) CHECK(b.next_u64() == xs[static_cast<std::size_t>(i)]);
  CHECK(c.next_u64() != xs[0]);
  CHECK(a.counter() == 5);
  CounterRng u(1, 0);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const double x = u.uniform();
    CHECK((x >= 0.0 && x < 1.0));
    sum += x;
  }
  CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("sample_batch") {
  const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
  CounterRng rng(0, 0);
  for (int i = 0; i < 100; ++i) {
    const auto b = sample_batch(w, 2, rng);
    CHECK(b.size() == 2);
    CHECK(b[0] < b[1]);
  }
  CHECK(sample_batch(w, 4, rng) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK_THROWS_AS(sample_batch(w, 0, rng), ValidationError);
  CHECK_THROWS_AS(sample_batch(w, 5, rng), ValidationError);
  // frequencies follow the weights for single draws
  const std::vector<double> w2{0.25, 0.75};
  int first = 0;
  for (int i = 0; i < 20000; ++i) first += sample_batch(w2, 1, rng)[0] == 0;
  CHECK(first / 20000.0 == doctest::Approx(0.25).epsilon(0.05));
  // zero-weight samples are never drawn
  const std::vector<double> w3{1.0, 0.0};
  for (int i = 0; i < 100; ++i) CHECK(sample_batch(w3, 1, rng)[0] == 0);
}

TEST_CASE("sgd step") {
  const auto obj = objective::appendix_c_objective(0.5);
  const Eigen::VectorXd t = v({1.4, 0.3});
  CounterRng rng(1, 0);
  const auto full = sgd_step(obj, t, 0.2, 2, rng);
  CHECK(full.theta == gd_map(obj, t, 0.2).theta);
  const auto frozen = sgd_step(obj, t, 0.0, 1, rng);
  CHECK(frozen.theta == t);
  // p = 1: every batch is the first sample, whose fixed points are the minima
  const auto obj1 = objective::appendix_c_objective(1.0);
  for (double a : {0.5, 1.0, 1.7}) {
    const Eigen::VectorXd m = v({a, 1.0 / a});
    const auto s = sgd_step(obj1, m, 0.3, 1, rng);
    CHECK(s.batch == std::vector<std::size_t>{0});
    CHECK((s.theta - m).norm() < 1e-15);
  }
  CHECK((sgd_step(obj1, v({1.2, 1.2}), 0.3, 1, rng).theta - v({1.2, 1.2})).norm() > 1e-3);
}

TEST_CASE("gd jacobian") {
  const auto f1 = objective::figure1_objective();
  CHECK(gd_jacobian(f1, v({2.5}), 0.5).jacobian(0, 0) == 0.0);
  const auto obj = objective::appendix_c_objective(0.5);
  CHECK(gd_jacobian(obj, v({0.7, 1.3}), 0.0).jacobian == Eigen::MatrixXd::Identity(2, 2));
  Eigen::Matrix2d expect = Eigen::Matrix2d::Identity() - 0.1 * 3.53 * Eigen::Matrix2d::Ones();
  CHECK(oracle::rel_err(gd_jacobian(obj, v({1, 1}), 0.1).jacobian, expect) < 1e-14);
  // against the finite-difference Jacobian of the map itself
  const Eigen::VectorXd t = v({1.3, 0.5});
  const auto g = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return gd_map(obj, x, 0.2).theta; };
  CHECK(oracle::rel_err(gd_jacobian(obj, t, 0.2).jacobian, oracle::fd_jacobian(g, t)) < 1e-8);
  const auto hit = gd_jacobian(f1, v({2.0}), 0.1);
  CHECK_FALSE(hit.reliable);
}

TEST_CASE("det_and_eigs") {
  const auto id = det_and_eigs(Eigen::MatrixXd::Identity(3, 3));
  CHECK(id.determinant == 1.0);
  for (double e : id.eigenvalues) CHECK(e == doctest::Approx(1.0));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 6;
  d(1, 1) = 2;
  const auto de = det_and_eigs(d);
  CHECK(de.determinant == doctest::Approx(12.0));
  CHECK(de.eigenvalues[0] == doctest::Approx(2.0));
  CHECK(de.eigenvalues[1] == doctest::Approx(6.0));
  const auto ones = det_and_eigs(Eigen::MatrixXd::Ones(2, 2));
  CHECK(ones.determinant == doctest::Approx(0.0));
  CHECK(ones.eigenvalues[0] == doctest::Approx(0.0));
  CHECK(ones.eigenvalues[1] == doctest::Approx(2.0));
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 2, 0, 1;
  CHECK_THROWS_AS(det_and_eigs(asym), ValidationError);
  CHECK_THROWS_AS(det_and_eigs(Eigen::MatrixXd::Ones(2, 3)), ValidationError);
}

TEST_CASE("jacobi and lu against Eigen on random symmetric matrices") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return std::normal_distribution<double>()(rng); });
    a = (a + a.transpose()).eval();
    const auto de = det_and_eigs(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    for (int i = 0; i < n; ++i) CHECK(de.eigenvalues[static_cast<std::size_t>(i)] == doctest::Approx(es.eigenvalues()(i)).scale(1.0));
    CHECK(de.determinant == doctest::Approx(a.determinant()).scale(1.0));
  }
}

TEST_CASE("singular step-sizes") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 6;
  const auto s = singular_stepsizes_from_hessian(d);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(1.0 / 6));
  CHECK(s[1] == doctest::Approx(0.5));
  CHECK(singular_stepsizes_from_hessian(Eigen::MatrixXd::Zero(2, 2)).empty());
  d(0, 0) = -4;
  CHECK(singular_stepsizes_from_hessian(d).front() == doctest::Approx(-0.25));
  const auto f1 = objective::figure1_objective();
  for (double t : {-3.0, 2.5, 4.0, 10.0}) {
    const auto r = singular_stepsizes(f1, v({t}));
    REQUIRE(r.stepsizes.size() == 1);
    CHECK(r.stepsizes[0] == 0.5);
  }
  const auto ac = singular_stepsizes(objective::appendix_c_objective(0.5), v({1, 1}));
  REQUIRE(ac.stepsizes.size() == 1);
  CHECK(ac.stepsizes[0] == doctest::Approx(1.0 / 7.06));
}

TEST_CASE("iterate") {
  const auto obj = objective::appendix_c_objective(0.5);
  const Eigen::VectorXd t0 = v({1.48, 1.0 / 1.48 + 0.1});
  GDConfig cfg;
  cfg.eta = 0.25;
  const auto none = iterate(obj, t0, cfg, 0);
  REQUIRE(none.points.size() == 1);
  CHECK(none.points[0].theta == t0);
  const auto tr = iterate(obj, t0, cfg, 500);
  CHECK(tr.points.size() == 501);
  // The first steps overshoot across the minimum (normal multiplier near -0.9);
  // once the loss has dropped below 1e-3 it decreases monotonically until it
  // reaches round-off.
  std::size_t settle = 0;
  while (tr.points[settle].loss >= 1e-3) ++settle;
  CHECK(settle > 1);
  for (std::size_t i = settle + 1; i < tr.points.size() && tr.points[i - 1].loss > 1e-28; ++i)
    CHECK(tr.points[i].loss <= tr.points[i - 1].loss);
  CHECK(tr.points.back().loss < 1e-12);
  const auto& last = tr.points.back().theta;
  CHECK(std::abs(last(0) * last(1) - 1.0) < 1e-6);

  GDConfig sched;
  sched.schedule = {0.1, 0.2};
  CHECK_THROWS_AS(iterate(obj, t0, sched, 3), ValidationError);
  const auto st = iterate(obj, t0, sched, 2);
  CHECK(st.points[0].eta.value() == 0.1);
  CHECK(st.points[1].eta.value() == 0.2);
  CHECK_FALSE(st.points[2].eta);

  GDConfig sgd;
  sgd.eta = 0.1;
  sgd.batch_size = 1;
  sgd.rng_seed = 17;
  const auto a = iterate(obj, t0, sgd, 50);
  const auto b = iterate(obj, t0, sgd, 50);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].theta == b.points[i].theta);
    CHECK(a.points[i].batch == b.points[i].batch);
  }
  sgd.rng_seed = 18;
  CHECK(iterate(obj, t0, sgd, 50).points.back().theta != a.points.back().theta);
}

TEST_CASE("compose_schedule determinant equals product of step determinants") {
  const auto obj = objective::appendix_c_objective(0.5);
  const std::vector<double> schedule{0.05, 0.12, 0.2, 0.08};
  const Eigen::VectorXd t0 = v({1.3, 0.4});
  const auto res = compose_schedule(obj, t0, schedule);
  const auto comp = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd y = x;
    for (double e : schedule) y = gd_map(obj, y, e).theta;
    return y;
  };
  CHECK((res.theta - comp(t0)).norm() == 0.0);
  CHECK(res.det_product == doctest::Approx(oracle::fd_jacobian(comp, t0, 1e-5).determinant()).epsilon(1e-8));
}

TEST_CASE("region image probe") {
  const auto obj = objective::figure1_objective();
  const auto collapse = region_image_probe(obj, Box::interval(2.1, 2.7), 0.5, 101);
  CHECK(collapse.image_diameter < 1e-12);
  CHECK(collapse.collapsed);
  const auto fine = region_image_probe(obj, Box::interval(2.1, 2.7), 0.25, 101);
  CHECK(std::abs(fine.image_diameter - 0.3) < 1e-9);
  CHECK_FALSE(fine.collapsed);
  const auto id = region_image_probe(obj, Box::interval(-1.0, 0.5), 0.0, 11);
  for (std::size_t i = 0; i < id.inputs.size(); ++i) CHECK(id.inputs[i] == id.outputs[i]);
  const auto box = region_image_probe(objective::appendix_c_objective(0.5),
                                      Box{v({0.5, 0.5}), v({2, 2})}, 0.0, 100);
  CHECK(box.inputs.size() == 100);
  CHECK(box.image_diameter == doctest::Approx(std::sqrt(2.0) * 1.5));
  CHECK_THROWS_AS(Box::interval(1.0, 1.0).validate(), ValidationError);
}

TEST_CASE("det probe on the quadratic") {
  const auto q = objective::quadratic_objective();
  const auto a = det_probe(q, Box::interval(-1, 1), 0.1, 1000, {0.5, 0.1}, 0);
  for (double f : a.fractions) CHECK(f == 0.0);
  const auto b = det_probe(q, Box::interval(-1, 1), 0.5, 1000, {1e-2, 1e-6}, 0);
  for (double f : b.fractions) CHECK(f == 1.0);
  CHECK_THROWS_AS(det_probe(q, Box::interval(-1, 1), 0.5, 0, {1e-2}, 0), ValidationError);
  CHECK_THROWS_AS(det_probe(q, Box::interval(-1, 1), 0.5, 10, {}, 0), ValidationError);
}

TEST_CASE("det probe fractions are nonincreasing and reproducible") {
  const auto obj = objective::appendix_c_objective(0.5);
  const Box box{v({0.5, 0.5}), v({2, 2})};
  const auto r = det_probe(obj, box, 0.1, 5000, {1e-4, 1e-1, 1e-2, 1e-3}, 3);
  CHECK(r.eps.front() == 1e-1);
  for (std::size_t i = 1; i < r.fractions.size(); ++i) CHECK(r.fractions[i] <= r.fractions[i - 1]);
  const auto again = det_probe(obj, box, 0.1, 5000, {1e-4, 1e-1, 1e-2, 1e-3}, 3);
  CHECK(again.fractions == r.fractions);
  // oracle: brute-force count with an independent determinant
  std::size_t count = 0;
  for (std::size_t i = 0; i < 5000; ++i) {
    CounterRng rng(3, i);
    Eigen::VectorXd t(2);
    t(0) = rng.uniform(0.5, 2);
    t(1) = rng.uniform(0.5, 2);
    const Eigen::MatrixXd j = Eigen::MatrixXd::Identity(2, 2) - 0.1 * obj.jet(t).hess;
    count += std::abs(j.determinant()) < 1e-1;
  }
  CHECK(r.counts.front() == count);
}

TEST_CASE("loglog slope") {
  CHECK(loglog_slope({1e-2, 1e-3, 1e-4}, {1e-2, 1e-3, 1e-4}) == doctest::Approx(1.0));
  CHECK(loglog_slope({1e-2, 1e-3, 1e-4}, {4e-4, 4e-6, 4e-8}) == doctest::Approx(2.0));
  CHECK(std::isnan(loglog_slope({1e-2, 1e-3}, {1e-2, 0.0})));
}

TEST_CASE("breakpoint samples") {
  const auto obj = objective::appendix_c_objective(0.5);
  CHECK(count_breakpoint_samples(obj, Box{v({0.5, 0.5}), v({2, 2})}, 10000, 0) == 0);
  // theta_1 < 0 kills the first relu, so the second one sees an exact 0 on
  // half of this box (interior of the zero set, not a crossing).
  const auto wide = count_breakpoint_samples(obj, Box{v({-2, -2}), v({2, 2})}, 10000, 0);
  CHECK(wide > 4500);
  CHECK(wide < 5500);
  CHECK(obj.breakpoint_proximity(v({0.0, 1.0})) == 0.0);
}
