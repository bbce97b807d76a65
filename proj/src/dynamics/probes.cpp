#include "gdlab/dynamics/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gdlab/dynamics/gd.hpp"
#include "gdlab/dynamics/linalg.hpp"
#include "gdlab/dynamics/rng.hpp"
#include "gdlab/errors.hpp"

namespace gdlab::dynamics {

Box Box::interval(double lo, double hi) {
  return {Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi)};
}

void Box::validate() const {
  if (lo.size() == 0 || lo.size() != hi.size()) throw ValidationError("box bounds must have equal, nonzero length");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo(i)) || !std::isfinite(hi(i)) || !(lo(i) < hi(i))) {
      throw ValidationError("box must satisfy lo < hi on every axis");
    }
  }
}

std::vector<Eigen::VectorXd> lattice(const Box& box, std::size_t n_per_axis) {
  box.validate();
  if (n_per_axis == 0) return {};
  const Eigen::Index d = box.dim();
  std::size_t total = 1;
  for (Eigen::Index a = 0; a < d; ++a) total *= n_per_axis;
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(total);
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t k = 0; k < total; ++k) {
    Eigen::VectorXd p(d);
    for (Eigen::Index a = 0; a < d; ++a) {
      const std::size_t i = idx[static_cast<std::size_t>(a)];
      if (n_per_axis == 1) {
        p(a) = 0.5 * (box.lo(a) + box.hi(a));
      } else if (i + 1 == n_per_axis) {
        p(a) = box.hi(a);
      } else {
        const double t = static_cast<double>(i) / static_cast<double>(n_per_axis - 1);
        p(a) = box.lo(a) + t * (box.hi(a) - box.lo(a));
      }
    }
    pts.push_back(std::move(p));
    for (Eigen::Index a = d - 1; a >= 0; --a) {
      auto& i = idx[static_cast<std::size_t>(a)];
      if (++i < n_per_axis) break;
      i = 0;
    }
  }
  return pts;
}

RegionImageResult region_image_probe(const objective::Objective& obj, const Box& region,
                                     double eta, std::size_t n_samples) {
  region.validate();
  if (n_samples == 0) throw ValidationError("region probe needs at least one sample");
  const Eigen::Index d = region.dim();
  std::size_t per_axis = n_samples;
  if (d > 1) {
    per_axis = static_cast<std::size_t>(std::lround(std::pow(static_cast<double>(n_samples), 1.0 / static_cast<double>(d))));
    per_axis = std::max<std::size_t>(per_axis, 2);
  }
  RegionImageResult out;
  out.inputs = lattice(region, per_axis);
  out.region_diameter = region.diameter();
  out.outputs.reserve(out.inputs.size());
  for (const auto& p : out.inputs) {
    auto step = gd_map(obj, p, eta);
    out.breakpoint_hits += step.breakpoint_hits;
    out.outputs.push_back(std::move(step.theta));
  }
  out.image_lo = out.outputs.front();
  out.image_hi = out.outputs.front();
  for (const auto& q : out.outputs) {
    out.image_lo = out.image_lo.cwiseMin(q);
    out.image_hi = out.image_hi.cwiseMax(q);
  }
  if (d == 1) {
    out.image_diameter = out.image_hi(0) - out.image_lo(0);
  } else {
    double best = 0.0;
    for (std::size_t i = 0; i < out.outputs.size(); ++i)
      for (std::size_t j = i + 1; j < out.outputs.size(); ++j)
        best = std::max(best, (out.outputs[i] - out.outputs[j]).norm());
    out.image_diameter = best;
  }
  out.collapsed = out.image_diameter < kCollapseImageDiameter && out.region_diameter > kCollapseRegionDiameter;
  return out;
}

namespace {

Eigen::VectorXd uniform_in(const Box& box, CounterRng& rng) {
  Eigen::VectorXd p(box.dim());
  for (Eigen::Index a = 0; a < box.dim(); ++a) p(a) = rng.uniform(box.lo(a), box.hi(a));
  return p;
}

}  // namespace

DetProbeResult det_probe(const objective::Objective& obj, const Box& box, double eta,
                         std::size_t n_samples, std::vector<double> eps_grid, std::uint64_t seed) {
  box.validate();
  if (n_samples == 0) throw ValidationError("det probe needs at least one sample");
  if (eps_grid.empty()) throw ValidationError("det probe needs at least one eps");
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw ValidationError("eps values must be positive");
  }
  std::sort(eps_grid.begin(), eps_grid.end(), std::greater<>());

  DetProbeResult out;
  out.eta = eta;
  out.n_samples = n_samples;
  out.eps = eps_grid;
  out.counts.assign(eps_grid.size(), 0);
  const double smallest = eps_grid.back();
  for (std::size_t i = 0; i < n_samples; ++i) {
    CounterRng rng(seed, i);
    const Eigen::VectorXd theta = uniform_in(box, rng);
    const auto j = obj.jet(theta);
    if (j.breakpoint_hits > 0) {
      ++out.breakpoint_samples;
      continue;
    }
    const double det = std::abs(lu_determinant(gd_jacobian_from_hessian(j.hess, eta)));
    for (std::size_t k = 0; k < eps_grid.size(); ++k) {
      if (det < eps_grid[k]) ++out.counts[k];
    }
    if (det < smallest && out.singular_eta_candidates.size() < 1000) {
      double best = std::numeric_limits<double>::quiet_NaN();
      for (double s : singular_stepsizes_from_hessian(j.hess)) {
        if (std::isnan(best) || std::abs(s - eta) < std::abs(best - eta)) best = s;
      }
      if (!std::isnan(best)) out.singular_eta_candidates.push_back(best);
    }
  }
  const std::size_t valid = n_samples - out.breakpoint_samples;
  for (std::size_t c : out.counts) {
    out.fractions.push_back(valid == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(valid));
  }
  std::sort(out.singular_eta_candidates.begin(), out.singular_eta_candidates.end());
  return out;
}

double loglog_slope(const std::vector<double>& eps, const std::vector<double>& fractions) {
  if (eps.size() != fractions.size()) throw DimensionError("eps and fraction lists differ in length");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (fractions[i] > 0.0) {
      xs.push_back(std::log(eps[i]));
      ys.push_back(std::log(fractions[i]));
    }
  }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

std::size_t count_breakpoint_samples(const objective::Objective& obj, const Box& box,
                                     std::size_t n_samples, std::uint64_t seed) {
  box.validate();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    CounterRng rng(seed, i);
    if (obj.breakpoint_proximity(uniform_in(box, rng)) == 0.0) ++hits;
  }
  return hits;
}

}  // namespace gdlab::dynamics
