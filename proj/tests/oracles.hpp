#pragma once
// Test-side reference computations: central differences, a brute-force
// root scan and a random network generator. Nothing here calls into the
// derivative code under test.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "gdlab/calculus/activations.hpp"
#include "gdlab/network/network.hpp"

namespace oracle {

using VecFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

inline Eigen::VectorXd fd_gradient(const ScalarFn& f, const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// Column j is the central difference along e_j.
inline Eigen::MatrixXd fd_jacobian(const VecFn& f, const Eigen::VectorXd& x, double h = 1e-6) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd j(f0.size(), x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Eigen::VectorXd xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    j.col(c) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

inline double rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& ref, double floor = 1e-2) {
  const double scale = std::max(ref.cwiseAbs().maxCoeff(), floor);
  return (got - ref).cwiseAbs().maxCoeff() / scale;
}

// Roots of a scalar function by a dense sign scan plus bisection.
inline std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi,
                                      int n = 200000) {
  std::vector<double> roots;
  double x0 = lo, f0 = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double x1 = lo + (hi - lo) * i / n;
    const double f1 = f(x1);
    if (f0 == 0.0) roots.push_back(x0);
    else if ((f0 < 0) != (f1 < 0) && f1 != 0.0) {
      double a = x0, b = x1, fa = f0;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

inline gdlab::calculus::PiecewiseFn random_activation(std::mt19937_64& rng) {
  using namespace gdlab::calculus;
  switch (std::uniform_int_distribution<int>(0, 6)(rng)) {
    case 0: return identity_fn();
    case 1: return relu_fn();
    case 2: return leaky_relu_fn(0.1);
    case 3: return sigmoid_fn();
    case 4: return tanh_fn();
    case 5: return max1_fn();
    default: return square_fn();
  }
}

// 1-3 layers; the first layer kind cycles with `kind` so every kind is hit.
inline gdlab::network::NetworkSpec random_spec(std::mt19937_64& rng, int kind) {
  using namespace gdlab::network;
  std::uniform_int_distribution<int> small(1, 3);
  const int n_layers = small(rng);
  std::vector<LayerSpec> layers;
  int width = kind == 2 ? 2 * small(rng) : small(rng);
  for (int l = 0; l < n_layers; ++l) {
    const int k = l == 0 ? kind : std::uniform_int_distribution<int>(0, 2)(rng);
    if (k == 2) {
      std::vector<int> divisors;
      for (int d = 1; d <= width; ++d)
        if (width % d == 0) divisors.push_back(d);
      const int md = divisors[std::uniform_int_distribution<std::size_t>(0, divisors.size() - 1)(rng)];
      AttentionLayer a{md, width / md, std::nullopt};
      if (std::uniform_int_distribution<int>(0, 1)(rng)) a.scale = std::uniform_real_distribution<double>(0.2, 1.5)(rng);
      layers.emplace_back(a);
    } else if (k == 1) {
      const int out = small(rng);
      const int cells = out * width;
      const int shared = std::uniform_int_distribution<int>(1, std::min(cells, 3))(rng);
      std::vector<int> pattern(static_cast<std::size_t>(cells));
      for (int c = 0; c < cells; ++c) pattern[static_cast<std::size_t>(c)] = c < shared ? c : std::uniform_int_distribution<int>(0, shared - 1)(rng);
      std::shuffle(pattern.begin(), pattern.end(), rng);
      layers.emplace_back(TiedLayer{out, width, pattern, random_activation(rng)});
      width = out;
    } else {
      const int out = small(rng);
      layers.emplace_back(DenseLayer{out, width, random_activation(rng)});
      width = out;
    }
  }
  return NetworkSpec(std::move(layers));
}

// Central differences of the jet gradient, column j from theta +- h e_j, all outputs at once.
inline std::vector<Eigen::MatrixXd> fd_hessians(const gdlab::network::NetworkSpec& spec, const Eigen::VectorXd& theta,
                                                const Eigen::VectorXd& x, double h = 1e-5) {
  const Eigen::Index n = theta.size();
  const auto m = static_cast<std::size_t>(spec.output_size());
  std::vector<Eigen::MatrixXd> out(m, Eigen::MatrixXd(n, n));
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(j) += h;
    tm(j) -= h;
    const Eigen::MatrixXd gp = gdlab::network::forward_jet2(spec, tp, x).grad;
    const Eigen::MatrixXd gm = gdlab::network::forward_jet2(spec, tm, x).grad;
    for (std::size_t o = 0; o < m; ++o) {
      const auto r = static_cast<Eigen::Index>(o);
      out[o].col(j) = (gp.row(r) - gm.row(r)).transpose() / (2 * h);
    }
  }
  return out;
}

inline Eigen::VectorXd uniform_vec(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

}  // namespace oracle
