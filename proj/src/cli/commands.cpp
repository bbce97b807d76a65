#include "gdlab/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gdlab/cli/csv.hpp"
#include "gdlab/dynamics/gd.hpp"
#include "gdlab/dynamics/probes.hpp"
#include "gdlab/errors.hpp"
#include "gdlab/network/network_json.hpp"
#include "gdlab/objective/named.hpp"
#include "gdlab/orbits/orbits.hpp"
#include "gdlab/stability/stability.hpp"

namespace gdlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? env : ".";
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (!fs::is_directory(p)) throw ValidationError("output directory " + dir + " is not writable");
  return p;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json vec_json(const Eigen::VectorXd& v) { return network::params_to_json(v); }

json arcs_json(const std::vector<stability::Interval>& arcs) {
  json out = json::array();
  for (const auto& a : arcs) out.push_back({a.lo, a.hi});
  return out;
}

// Objective selection shared by det-probe and singular-eta.
struct ObjectiveOptions {
  std::string objective = "appendixC";
  std::string net_file;
  std::string data_file;
  std::string loss = "half_squared";
  double p = 0.5;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--objective", objective, "built-in objective: figure1, quadratic, appendixC");
    cmd->add_option("--net", net_file, "network JSON file (with --data)");
    cmd->add_option("--data", data_file, "dataset CSV file (with --net)");
    cmd->add_option("--loss", loss, "per-sample loss");
    cmd->add_option("--p", p, "sampling weight of the data point (0.9, 0.9)")->check(CLI::Range(0.0, 1.0));
  }

  std::unique_ptr<objective::Objective> build() const {
    if (net_file.empty() != data_file.empty()) throw ValidationError("--net and --data must be given together");
    if (!net_file.empty()) {
      return std::make_unique<objective::NetworkObjective>(network::load_network(net_file),
                                                           objective::load_dataset_csv(data_file),
                                                           objective::LossSpec::from_name(loss));
    }
    return objective::make_named_objective(objective, p);
  }
};

struct Fig1Options {
  double eta = 0.5;
  std::vector<double> interval{2.1, 2.7};
  std::size_t samples = 101;
};

int run_fig1(const Fig1Options& o, const fs::path& out_dir, std::ostream& out) {
  const auto obj = objective::figure1_objective();
  const auto res = dynamics::region_image_probe(obj, dynamics::Box::interval(o.interval[0], o.interval[1]),
                                                o.eta, o.samples);
  CsvWriter map(out_dir / "fig1_map.csv", {"theta_in", "theta_out"});
  for (std::size_t i = 0; i < res.inputs.size(); ++i) map.row_numbers({res.inputs[i](0), res.outputs[i](0)});
  CsvWriter region(out_dir / "fig1_region.csv", {"eta", "diameter", "collapsed"});
  region.row({format_double(o.eta), format_double(res.image_diameter), res.collapsed ? "1" : "0"});
  write_json(out_dir / "fig1_summary.json",
             {{"eta", o.eta},
              {"interval", o.interval},
              {"samples", o.samples},
              {"diameter", res.image_diameter},
              {"image", {res.image_lo(0), res.image_hi(0)}},
              {"collapsed", res.collapsed},
              {"breakpoint_hits", res.breakpoint_hits}});
  out << "fig1: eta=" << format_double(o.eta) << " diameter=" << format_double(res.image_diameter)
      << " collapsed=" << (res.collapsed ? "true" : "false") << '\n';
  return kExitOk;
}

struct BifurcationOptions {
  double eta_min = 0.05;
  double eta_max = 0.4;
  std::size_t eta_steps = 100;
  int kmax = 2;
  std::vector<double> interval{0.25, 1.75};
  std::size_t grid = 4000;
  double p = 0.5;
};

int run_bifurcation(const BifurcationOptions& o, const fs::path& out_dir, std::ostream& out) {
  const auto obj = objective::appendix_c_objective(o.p);
  orbits::SweepConfig cfg{o.eta_min, o.eta_max, o.eta_steps, o.kmax, o.interval[0], o.interval[1], o.grid};
  const auto records = orbits::bifurcation_sweep(obj, cfg);
  CsvWriter csv(out_dir / "bifurcation.csv",
                {"eta", "k", "point_index", "theta_1", "theta_2", "multiplier_real", "multiplier_imag", "stable"});
  for (const auto& r : records) {
    // Dominant non-neutral multiplier; multipliers are sorted by modulus.
    std::complex<double> m = r.multipliers.empty() ? std::complex<double>{} : r.multipliers.front();
    for (std::size_t i = 0; i < r.multipliers.size(); ++i) {
      if (!r.neutral[i]) {
        m = r.multipliers[i];
        break;
      }
    }
    for (std::size_t j = 0; j < r.points.size(); ++j) {
      csv.row({format_double(r.eta), std::to_string(r.period), std::to_string(j), format_double(r.points[j](0)),
               format_double(r.points[j](1)), format_double(m.real()), format_double(m.imag()),
               r.stable ? "1" : "0"});
    }
  }
  out << "bifurcation: " << records.size() << " orbits\n";
  return kExitOk;
}

struct StableMinimaOptions {
  double eta = 0.15;
  double p = 0.5;
  std::vector<double> theta_range{0.25, 4.0};
  std::size_t samples = 400;
  bool paper_literal = false;
};

int run_stable_minima(const StableMinimaOptions& o, const fs::path& out_dir, std::ostream& out) {
  const stability::StabilityConfig cfg{o.eta, o.p};
  const auto form = o.paper_literal ? stability::LambdaForm::PaperLiteral : stability::LambdaForm::Corrected;
  const auto arcs = stability::stable_arcs(cfg, form);
  const auto principal = stability::principal_arc(arcs.sgd);
  const stability::Interval sampled{o.theta_range[0], o.theta_range[1]};
  const auto spans = [&](const std::vector<stability::Interval>& a) {
    return std::any_of(a.begin(), a.end(), [&](const auto& i) { return i.contains(sampled); });
  };
  CsvWriter csv(out_dir / "minima.csv", {"theta_1", "theta_2", "mu", "lambda", "gd_stable", "sgd_stable"});
  const auto [lo, hi] = std::pair{o.theta_range[0], o.theta_range[1]};
  for (std::size_t i = 0; i < o.samples; ++i) {
    const double t = o.samples == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(o.samples - 1));
    const auto rep = stability::stability_report({t, 1.0 / t}, cfg, form);
    csv.row({format_double(t), format_double(1.0 / t), format_double(rep.mu), format_double(rep.lambda),
             rep.gd_stable ? "1" : "0", rep.sgd_stable ? "1" : "0"});
  }
  json doc{{"eta", o.eta},
           {"p", o.p},
           {"lambda_form", o.paper_literal ? "literal" : "corrected"},
           {"sampled_range", o.theta_range},
           {"gd_spans_sampled_range", spans(arcs.gd)},
           {"sgd_spans_sampled_range", spans(arcs.sgd)},
           {"gd", arcs_json(arcs.gd)},
           {"sgd", arcs_json(arcs.sgd)},
           {"principal_sgd", principal ? json{principal->lo, principal->hi} : json(nullptr)},
           {"sgd_within_gd", stability::arcs_contained(arcs.sgd, arcs.gd)},
           {"principal_sgd_within_gd", principal && stability::arcs_contained({*principal}, arcs.gd)},
           {"arcs_intersect", stability::arcs_intersect(arcs.gd, arcs.sgd)}};
  write_json(out_dir / "arcs.json", doc);
  out << "stable-minima: " << arcs.gd.size() << " GD arcs, " << arcs.sgd.size() << " SGD arcs\n";
  return kExitOk;
}

struct TrajectoryOptions {
  std::string objective = "appendixC";
  std::vector<double> theta0;
  double eta = 0.25;
  std::size_t steps = 500;
  std::optional<std::size_t> batch_size;
  std::uint64_t seed = 0;
  std::string schedule_file;
  double p = 0.5;
};

int run_trajectory(const TrajectoryOptions& o, const fs::path& out_dir, std::ostream& out) {
  const auto obj = objective::make_named_objective(o.objective, o.p);
  Eigen::VectorXd theta0;
  if (o.theta0.empty()) {
    if (obj->n_params() != 2) throw ValidationError("--theta0 is required for this objective");
    theta0 = Eigen::Vector2d(1.48, 1.0 / 1.48 + 0.1);
  } else {
    theta0 = Eigen::Map<const Eigen::VectorXd>(o.theta0.data(), static_cast<Eigen::Index>(o.theta0.size()));
  }
  if (theta0.size() != obj->n_params()) throw ValidationError("--theta0 has the wrong number of values");
  dynamics::GDConfig cfg;
  cfg.eta = o.eta;
  cfg.rng_seed = o.seed;
  cfg.batch_size = o.batch_size;
  if (!o.schedule_file.empty()) {
    const auto table = read_csv(o.schedule_file);
    const std::size_t col = table.column("eta");
    for (const auto& row : table.rows) cfg.schedule.push_back(row.at(col));
  }

  const auto traj = dynamics::iterate(*obj, theta0, cfg, o.steps);
  std::vector<std::string> header{"step"};
  for (Eigen::Index i = 0; i < theta0.size(); ++i) header.push_back("theta_" + std::to_string(i + 1));
  header.insert(header.end(), {"loss", "grad_norm", "bp_hits"});
  CsvWriter csv(out_dir / "trajectory.csv", header);
  bool finite = true;
  for (const auto& pt : traj.points) {
    std::vector<std::string> cells{std::to_string(pt.step)};
    for (Eigen::Index i = 0; i < pt.theta.size(); ++i) cells.push_back(format_double(pt.theta(i)));
    cells.insert(cells.end(), {format_double(pt.loss), format_double(pt.grad_norm), std::to_string(pt.breakpoint_hits)});
    csv.row(cells);
    finite = finite && pt.theta.allFinite();
  }

  const auto& last = traj.points.back().theta;
  json summary{{"final_theta", vec_json(last)}, {"final_loss", traj.points.back().loss}, {"steps", o.steps}};
  if (last.size() == 2 && last.allFinite()) {
    summary["distance_to_minima"] = stability::distance_to_minimum_branch(last);
  }
  if (traj.points.size() >= 3) {
    const auto& prev = traj.points[traj.points.size() - 2].theta;
    const auto& prev2 = traj.points[traj.points.size() - 3].theta;
    const double gap = (last - prev).norm();
    const double period2 = (last - prev2).norm();
    summary["tail_gap"] = gap;
    summary["period2_residual"] = period2;
    summary["two_cycle"] = gap > 0.01 && period2 < 1e-6;
  }
  summary["finite"] = finite;
  summary["diverged"] = traj.diverged;
  write_json(out_dir / "trajectory_summary.json", summary);
  if (traj.diverged || !finite) {
    throw NumericFailure("trajectory diverged at step " + std::to_string(traj.points.back().step));
  }
  out << "trajectory: " << traj.points.size() << " points\n";
  return kExitOk;
}

struct DetProbeOptions {
  ObjectiveOptions objective;
  double eta = 0.1;
  std::vector<double> box;
  std::size_t samples = 100000;
  std::vector<double> eps_grid{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::uint64_t seed = 0;
};

dynamics::Box parse_box(const std::vector<double>& flat, Eigen::Index dim) {
  if (flat.size() != static_cast<std::size_t>(2 * dim)) {
    throw ValidationError("--box needs lo hi for each of the " + std::to_string(dim) + " parameters");
  }
  dynamics::Box box{Eigen::VectorXd(dim), Eigen::VectorXd(dim)};
  for (Eigen::Index i = 0; i < dim; ++i) {
    box.lo(i) = flat[static_cast<std::size_t>(2 * i)];
    box.hi(i) = flat[static_cast<std::size_t>(2 * i + 1)];
  }
  box.validate();
  return box;
}

int run_det_probe(const DetProbeOptions& o, const fs::path& out_dir, std::ostream& out) {
  if (o.samples == 0) throw ValidationError("--samples must be positive");
  const auto obj = o.objective.build();
  std::vector<double> flat = o.box;
  if (flat.empty()) {
    for (Eigen::Index i = 0; i < obj->n_params(); ++i) flat.insert(flat.end(), {0.5, 2.0});
  }
  const auto box = parse_box(flat, obj->n_params());
  const auto res = dynamics::det_probe(*obj, box, o.eta, o.samples, o.eps_grid, o.seed);
  CsvWriter csv(out_dir / "det_probe.csv", {"eta", "eps", "fraction"});
  for (std::size_t i = 0; i < res.eps.size(); ++i) csv.row_numbers({res.eta, res.eps[i], res.fractions[i]});
  write_json(out_dir / "det_probe.json",
             {{"eta", res.eta},
              {"n_samples", res.n_samples},
              {"breakpoint_samples", res.breakpoint_samples},
              {"eps", res.eps},
              {"fractions", res.fractions},
              {"counts", res.counts},
              {"loglog_slope", dynamics::loglog_slope(res.eps, res.fractions)},
              {"singular_eta_candidates", res.singular_eta_candidates}});
  out << "det-probe: " << res.n_samples << " samples\n";
  return kExitOk;
}

struct SingularEtaOptions {
  ObjectiveOptions objective;
  std::vector<double> theta;
};

int run_singular_eta(const SingularEtaOptions& o, const fs::path& out_dir, std::ostream& out) {
  const auto obj = o.objective.build();
  const Eigen::VectorXd theta =
      Eigen::Map<const Eigen::VectorXd>(o.theta.data(), static_cast<Eigen::Index>(o.theta.size()));
  if (theta.size() != obj->n_params()) throw ValidationError("--theta has the wrong number of values");
  const auto res = dynamics::singular_stepsizes(*obj, theta);
  write_json(out_dir / "singular_eta.json", {{"theta", vec_json(theta)},
                                             {"eigenvalues", res.eigenvalues},
                                             {"singular_stepsizes", res.stepsizes},
                                             {"reliable", res.reliable}});
  out << "singular-eta: " << res.stepsizes.size() << " step-sizes\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient-descent maps of small networks as dynamical systems", "gdlab"};
  app.require_subcommand(1);
  std::string out_dir = default_out_dir();
  const auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, std::string("output directory (default $") + kOutDirEnv + " or .)");
  };

  Fig1Options fig1;
  auto* c_fig1 = app.add_subcommand("fig1", "push an interval of the figure1 objective through G_eta");
  c_fig1->add_option("--eta", fig1.eta, "step-size")->check(CLI::NonNegativeNumber);
  c_fig1->add_option("--interval", fig1.interval, "lo hi")->expected(2);
  c_fig1->add_option("--samples", fig1.samples, "lattice points")->check(CLI::PositiveNumber);
  add_out(c_fig1);

  BifurcationOptions bif;
  auto* c_bif = app.add_subcommand("bifurcation", "periodic orbits of the diagonal reduction over an eta grid");
  c_bif->add_option("--eta-min", bif.eta_min);
  c_bif->add_option("--eta-max", bif.eta_max);
  c_bif->add_option("--eta-steps", bif.eta_steps, "grid points (0 gives an empty sweep)");
  c_bif->add_option("--kmax", bif.kmax, "largest period")->check(CLI::PositiveNumber);
  c_bif->add_option("--interval", bif.interval, "search interval lo hi on the diagonal")->expected(2);
  c_bif->add_option("--grid", bif.grid, "root search grid size")->check(CLI::Range(2, 10000000));
  c_bif->add_option("--p", bif.p)->check(CLI::Range(0.0, 1.0));
  add_out(c_bif);

  StableMinimaOptions sm;
  auto* c_sm = app.add_subcommand("stable-minima", "GD and SGD stable arcs on the minimum branch");
  c_sm->add_option("--eta", sm.eta)->check(CLI::PositiveNumber);
  c_sm->add_option("--p", sm.p)->check(CLI::Range(0.0, 1.0));
  c_sm->add_option("--theta-range", sm.theta_range, "sampled theta_1 range lo hi")->expected(2);
  c_sm->add_option("--samples", sm.samples)->check(CLI::PositiveNumber);
  c_sm->add_flag("--paper-literal-lambda", sm.paper_literal, "evaluate lambda without eta in the second term");
  add_out(c_sm);

  TrajectoryOptions tr;
  auto* c_tr = app.add_subcommand("trajectory", "iterate GD or SGD from theta0");
  c_tr->add_option("--objective", tr.objective);
  c_tr->add_option("--theta0", tr.theta0, "initial parameters");
  c_tr->add_option("--eta", tr.eta)->check(CLI::NonNegativeNumber);
  c_tr->add_option("--steps", tr.steps);
  c_tr->add_option("--batch-size", tr.batch_size, "SGD batch size (omit for GD)")->check(CLI::PositiveNumber);
  c_tr->add_option("--seed", tr.seed);
  c_tr->add_option("--schedule", tr.schedule_file, "CSV with an 'eta' column, one row per step");
  c_tr->add_option("--p", tr.p)->check(CLI::Range(0.0, 1.0));
  add_out(c_tr);

  DetProbeOptions dp;
  auto* c_dp = app.add_subcommand("det-probe", "fraction of samples with |det DG_eta| < eps");
  dp.objective.add_to(c_dp);
  c_dp->add_option("--eta", dp.eta)->check(CLI::NonNegativeNumber);
  c_dp->add_option("--box", dp.box, "lo hi per parameter (default 0.5 2)");
  c_dp->add_option("--samples", dp.samples);
  c_dp->add_option("--eps-grid", dp.eps_grid);
  c_dp->add_option("--seed", dp.seed);
  add_out(c_dp);

  SingularEtaOptions se;
  auto* c_se = app.add_subcommand("singular-eta", "step-sizes 1/lambda_i at which G_eta is singular");
  se.objective.add_to(c_se);
  c_se->add_option("--theta", se.theta, "parameters")->required();
  add_out(c_se);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  fs::path dir;
  try {
    dir = prepare_out_dir(out_dir);
    if (c_fig1->parsed()) {
      if (!(fig1.interval[0] < fig1.interval[1])) throw ValidationError("--interval needs lo < hi");
      return run_fig1(fig1, dir, out);
    }
    if (c_bif->parsed()) return run_bifurcation(bif, dir, out);
    if (c_sm->parsed()) {
      if (!(sm.theta_range[0] > 0.0 && sm.theta_range[0] < sm.theta_range[1])) {
        throw ValidationError("--theta-range needs 0 < lo < hi");
      }
      return run_stable_minima(sm, dir, out);
    }
    if (c_tr->parsed()) return run_trajectory(tr, dir, out);
    if (c_dp->parsed()) return run_det_probe(dp, dir, out);
    if (c_se->parsed()) return run_singular_eta(se, dir, out);
  } catch (const NumericFailure& e) {
    err << "numeric failure: " << e.what() << '\n';
    if (!dir.empty()) write_json(dir / "diagnostic.json", {{"error", e.what()}, {"exit_code", kExitNumeric}});
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  err << "no subcommand\n";
  return kExitUsage;
}

}  // namespace gdlab::cli
