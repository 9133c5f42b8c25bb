// Experiment runner: composes a forecaster, a reality, and monitor skeptics,
// then writes trajectories, calibration reports, validity summaries, and SVG
// charts. See README.md for the file formats.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "k29/experiment.hpp"
#include "k29/io.hpp"

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  if (!j.is_object()) throw std::runtime_error(path + ": config must be a JSON object");
  return j;
}

// Precedence: explicit flag > config file value > built-in default (the
// current value of `flag_value`).
template <typename T>
T pick(const CLI::App* cmd, const std::string& flag, const json& cfg,
       const std::string& key, const T& flag_value) {
  if (cmd->count(flag) > 0) return flag_value;
  if (cfg.contains(key)) return cfg[key].get<T>();
  return flag_value;
}

k29::ForecasterKind parse_forecaster_kind(const std::string& name) {
  if (name == "k29") return k29::ForecasterKind::k29;
  if (name == "laplace") return k29::ForecasterKind::laplace;
  if (name == "signlimit") return k29::ForecasterKind::signlimit;
  if (name == "defensive") return k29::ForecasterKind::defensive;
  if (name == "constant") return k29::ForecasterKind::constant;
  throw std::invalid_argument("unknown forecaster '" + name + "'");
}

k29::RealityKind parse_reality_kind(const std::string& name) {
  if (name == "bernoulli") return k29::RealityKind::bernoulli;
  if (name == "regime") return k29::RealityKind::regime;
  if (name == "dawid") return k29::RealityKind::dawid;
  if (name == "replay") return k29::RealityKind::replay;
  throw std::invalid_argument("unknown reality '" + name + "'");
}

struct SharedFlags {
  std::string config_path;
  // kernel
  double sigma = 0.01;
  std::string object_kernel = "none";
  double gamma = 1.0;
  std::string combine = "product";
  // solver
  int grid_points = 33;
  int bisection_iters = 10;
  double root_tolerance = 1e-9;
  // reality
  std::string reality = "bernoulli";
  double theta = 0.5;
  std::string script;
  bool expose_theta = false;
  std::string replay_path;
  // game
  std::uint64_t seed = 1;
  std::size_t rounds = 0;  // 0 = default (script length for regime, else 1000)
};

void add_kernel_solver_flags(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--sigma", f.sigma, "forecast kernel bandwidth");
  cmd->add_option("--object-kernel", f.object_kernel, "none|gaussian");
  cmd->add_option("--gamma", f.gamma, "object kernel bandwidth");
  cmd->add_option("--combine", f.combine, "product|sum");
  cmd->add_option("--grid-points", f.grid_points, "root scan grid size");
  cmd->add_option("--bisection-iters", f.bisection_iters, "bisection iterations");
  cmd->add_option("--root-tolerance", f.root_tolerance, "near-zero shortcut tolerance");
}

void add_reality_flags(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--reality", f.reality, "bernoulli|regime|dawid|replay");
  cmd->add_option("--theta", f.theta, "bernoulli probability of 1");
  cmd->add_option("--script", f.script, "regime script, e.g. 1000:0.5,1000:0,1000:1");
  cmd->add_flag("--expose-theta", f.expose_theta,
                "regime: expose segment theta as the object feature");
  cmd->add_option("--replay-path", f.replay_path, "recorded stream to replay");
  cmd->add_option("--seed", f.seed, "game seed");
  cmd->add_option("--rounds", f.rounds, "number of rounds");
}

k29::KernelSpec kernel_from(const CLI::App* cmd, const json& cfg, const SharedFlags& f) {
  k29::KernelSpec k;
  k.sigma = pick(cmd, "--sigma", cfg, "sigma", f.sigma);
  const std::string ok = pick(cmd, "--object-kernel", cfg, "object_kernel", f.object_kernel);
  if (ok == "none")
    k.object_kernel = k29::ObjectKernelKind::none;
  else if (ok == "gaussian")
    k.object_kernel = k29::ObjectKernelKind::gaussian;
  else
    throw std::invalid_argument("unknown object kernel '" + ok + "'");
  k.gamma = pick(cmd, "--gamma", cfg, "gamma", f.gamma);
  const std::string combine = pick(cmd, "--combine", cfg, "combine", f.combine);
  if (combine == "product")
    k.combine = k29::KernelCombine::product;
  else if (combine == "sum")
    k.combine = k29::KernelCombine::sum;
  else
    throw std::invalid_argument("unknown combine mode '" + combine + "'");
  k.validate();
  return k;
}

k29::RootSolverConfig solver_from(const CLI::App* cmd, const json& cfg,
                                  const SharedFlags& f) {
  k29::RootSolverConfig s;
  s.grid_points = pick(cmd, "--grid-points", cfg, "grid_points", f.grid_points);
  s.bisection_iters =
      pick(cmd, "--bisection-iters", cfg, "bisection_iters", f.bisection_iters);
  s.root_tolerance =
      pick(cmd, "--root-tolerance", cfg, "root_tolerance", f.root_tolerance);
  s.validate();
  return s;
}

k29::RealitySpec reality_from(const CLI::App* cmd, const json& cfg,
                              const SharedFlags& f) {
  k29::RealitySpec r;
  r.kind = parse_reality_kind(pick(cmd, "--reality", cfg, "reality", f.reality));
  r.theta = pick(cmd, "--theta", cfg, "theta", f.theta);
  const std::string script = pick(cmd, "--script", cfg, "script", f.script);
  if (!script.empty()) r.script = k29::parse_regime_script(script);
  r.expose_theta_as_object =
      pick(cmd, "--expose-theta", cfg, "expose_theta", f.expose_theta);
  r.replay_path = pick(cmd, "--replay-path", cfg, "replay_path", f.replay_path);
  r.seed = pick(cmd, "--seed", cfg, "seed", f.seed);
  r.validate();
  return r;
}

std::size_t rounds_from(const CLI::App* cmd, const json& cfg, const SharedFlags& f,
                        const k29::RealitySpec& reality) {
  std::size_t rounds = pick(cmd, "--rounds", cfg, "rounds", f.rounds);
  if (rounds == 0) {
    if (reality.kind == k29::RealityKind::regime)
      for (const auto& seg : reality.script) rounds += seg.count;
    else if (reality.kind == k29::RealityKind::replay)
      rounds = k29::read_replay_file(reality.replay_path).size();
    else
      rounds = 1000;
  }
  if (rounds == 0) throw std::invalid_argument("nothing to play: 0 rounds");
  return rounds;
}

k29::ForecasterSpec forecaster_from(const std::string& kind, double p0,
                                    const k29::KernelSpec& kernel,
                                    const k29::RootSolverConfig& solver) {
  k29::ForecasterSpec spec;
  spec.kind = parse_forecaster_kind(kind);
  spec.p0 = p0;
  spec.k29.kernel = kernel;
  spec.k29.solver = solver;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"defensive forecasting experiments (K29 and friends)"};
  app.require_subcommand(1);

  SharedFlags run_f, duel_f, validity_f;

  // --- run ---
  auto* run_cmd = app.add_subcommand("run", "play one game and log the trajectory");
  std::string run_forecaster = "k29";
  double run_p0 = 0.5;
  std::vector<std::string> run_skeptics;
  std::string run_traj = "trajectory.csv", run_summary = "summary.json";
  std::string run_history;
  run_cmd->add_option("--config", run_f.config_path, "JSON config file");
  run_cmd->add_option("--forecaster", run_forecaster,
                      "k29|laplace|signlimit|defensive|constant");
  run_cmd->add_option("--p0", run_p0, "constant forecaster value");
  run_cmd->add_option("--skeptic", run_skeptics,
                      "monitor skeptic spec, e.g. slln:eps=0.1 (repeatable; first "
                      "one is defended against)");
  run_cmd->add_option("--out-trajectory", run_traj, "trajectory CSV path");
  run_cmd->add_option("--out-summary", run_summary, "summary JSON path");
  run_cmd->add_option("--out-history", run_history,
                      "also dump the played rounds as JSON-lines");
  add_kernel_solver_flags(run_cmd, run_f);
  add_reality_flags(run_cmd, run_f);

  // --- duel ---
  auto* duel_cmd =
      app.add_subcommand("duel", "two forecasters on one identical stream");
  std::string duel_a = "k29", duel_b = "laplace";
  double duel_p0a = 0.5, duel_p0b = 0.5;
  std::string duel_traj = "duel.csv", duel_summary = "duel_summary.json";
  duel_cmd->add_option("--config", duel_f.config_path, "JSON config file");
  duel_cmd->add_option("--a", duel_a, "first forecaster");
  duel_cmd->add_option("--b", duel_b, "second forecaster");
  duel_cmd->add_option("--p0-a", duel_p0a, "constant value for forecaster a");
  duel_cmd->add_option("--p0-b", duel_p0b, "constant value for forecaster b");
  duel_cmd->add_option("--out-trajectory", duel_traj, "duel CSV path");
  duel_cmd->add_option("--out-summary", duel_summary, "summary JSON path");
  add_kernel_solver_flags(duel_cmd, duel_f);
  add_reality_flags(duel_cmd, duel_f);

  // --- plot ---
  auto* plot_cmd = app.add_subcommand("plot", "render CSV columns as an SVG chart");
  std::string plot_input, plot_columns, plot_output = "chart.svg";
  plot_cmd->add_option("--input", plot_input, "trajectory CSV")->required();
  plot_cmd->add_option("--columns", plot_columns, "comma-separated column names")
      ->required();
  plot_cmd->add_option("--output", plot_output, "SVG output path");

  // --- calibrate ---
  auto* cal_cmd = app.add_subcommand("calibrate", "binned calibration report");
  std::string cal_input, cal_output = "bins.csv";
  int cal_bins = 20;
  cal_cmd->add_option("--input", cal_input, "trajectory CSV (p and y columns)")
      ->required();
  cal_cmd->add_option("--bins", cal_bins, "number of equal-width bins");
  cal_cmd->add_option("--output", cal_output, "bins CSV path");

  // --- validity ---
  auto* val_cmd =
      app.add_subcommand("validity", "Monte Carlo check of the testing interpretation");
  std::string val_skeptic = "slln:eps=0.1";
  std::size_t val_runs = 10000;
  double val_threshold = 2.0;
  std::string val_summary = "validity.json";
  val_cmd->add_option("--config", validity_f.config_path, "JSON config file");
  val_cmd->add_option("--skeptic", val_skeptic, "skeptic spec");
  val_cmd->add_option("--theta", validity_f.theta, "true probability of 1");
  val_cmd->add_option("--rounds", validity_f.rounds, "rounds per run");
  val_cmd->add_option("--runs", val_runs, "number of Monte Carlo runs");
  val_cmd->add_option("--seed", validity_f.seed, "master seed");
  val_cmd->add_option("--threshold", val_threshold, "capital threshold C");
  val_cmd->add_option("--out-summary", val_summary, "summary JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const json cfg = load_config(run_f.config_path);
      k29::ExperimentConfig ec;
      ec.reality = reality_from(run_cmd, cfg, run_f);
      ec.rounds = rounds_from(run_cmd, cfg, run_f, ec.reality);
      ec.seed = pick(run_cmd, "--seed", cfg, "seed", run_f.seed);
      ec.forecaster = forecaster_from(
          pick(run_cmd, "--forecaster", cfg, "forecaster", run_forecaster),
          pick(run_cmd, "--p0", cfg, "p0", run_p0), kernel_from(run_cmd, cfg, run_f),
          solver_from(run_cmd, cfg, run_f));
      std::vector<std::string> skeptic_texts =
          pick(run_cmd, "--skeptic", cfg, "skeptics", run_skeptics);
      for (const std::string& text : skeptic_texts)
        ec.skeptics.push_back(k29::parse_skeptic_spec(text));
      ec.trajectory_path =
          pick(run_cmd, "--out-trajectory", cfg, "out_trajectory", run_traj);
      ec.summary_path = pick(run_cmd, "--out-summary", cfg, "out_summary", run_summary);
      ec.history_path = pick(run_cmd, "--out-history", cfg, "out_history", run_history);
      k29::cmd_run(ec);
    } else if (duel_cmd->parsed()) {
      const json cfg = load_config(duel_f.config_path);
      k29::DuelConfig dc;
      dc.reality = reality_from(duel_cmd, cfg, duel_f);
      dc.rounds = rounds_from(duel_cmd, cfg, duel_f, dc.reality);
      dc.seed = pick(duel_cmd, "--seed", cfg, "seed", duel_f.seed);
      const auto kernel = kernel_from(duel_cmd, cfg, duel_f);
      const auto solver = solver_from(duel_cmd, cfg, duel_f);
      dc.forecaster_a = forecaster_from(pick(duel_cmd, "--a", cfg, "a", duel_a),
                                        pick(duel_cmd, "--p0-a", cfg, "p0_a", duel_p0a),
                                        kernel, solver);
      dc.forecaster_b = forecaster_from(pick(duel_cmd, "--b", cfg, "b", duel_b),
                                        pick(duel_cmd, "--p0-b", cfg, "p0_b", duel_p0b),
                                        kernel, solver);
      dc.trajectory_path =
          pick(duel_cmd, "--out-trajectory", cfg, "out_trajectory", duel_traj);
      dc.summary_path =
          pick(duel_cmd, "--out-summary", cfg, "out_summary", duel_summary);
      const k29::DuelSummary s = k29::cmd_duel(dc);
      std::cout << "mean |p_a - p_b| = " << k29::format_double(s.mean_abs_diff)
                << ", max = " << k29::format_double(s.max_abs_diff) << "\n";
    } else if (plot_cmd->parsed()) {
      k29::PlotConfig pc;
      pc.input_csv = plot_input;
      std::istringstream cols(plot_columns);
      std::string col;
      while (std::getline(cols, col, ','))
        if (!col.empty()) pc.columns.push_back(col);
      pc.output_path = plot_output;
      k29::cmd_plot(pc);
    } else if (cal_cmd->parsed()) {
      k29::CalibrateConfig cc;
      cc.input_csv = cal_input;
      cc.bins = cal_bins;
      cc.output_path = cal_output;
      k29::cmd_calibrate(cc);
    } else if (val_cmd->parsed()) {
      const json cfg = load_config(validity_f.config_path);
      k29::ValidityConfig vc;
      vc.skeptic = k29::parse_skeptic_spec(
          pick(val_cmd, "--skeptic", cfg, "skeptic", val_skeptic));
      vc.theta = pick(val_cmd, "--theta", cfg, "theta", validity_f.theta);
      vc.rounds = pick(val_cmd, "--rounds", cfg, "rounds",
                       validity_f.rounds == 0 ? std::size_t{100} : validity_f.rounds);
      vc.runs = pick(val_cmd, "--runs", cfg, "runs", val_runs);
      vc.seed = pick(val_cmd, "--seed", cfg, "seed", validity_f.seed);
      vc.threshold = pick(val_cmd, "--threshold", cfg, "threshold", val_threshold);
      vc.summary_path = pick(val_cmd, "--out-summary", cfg, "out_summary", val_summary);
      const k29::ValidityReport r = k29::cmd_validity(vc);
      std::cout << "mean final capital = " << k29::format_double(r.mean_final_capital)
                << " (se " << k29::format_double(r.std_error) << "), P(sup K >= "
                << k29::format_double(r.threshold)
                << ") ~= " << k29::format_double(r.tail_freq) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
