#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "k29/forecaster.hpp"
#include "k29/metrics.hpp"
#include "k29/reality.hpp"
#include "k29/skeptic.hpp"

namespace k29 {

enum class ForecasterKind { k29, laplace, signlimit, defensive, constant };

struct ForecasterSpec {
  ForecasterKind kind = ForecasterKind::k29;
  double p0 = 0.5;  // constant
  K29Config k29;    // kernel + solver; solver also serves `defensive`
};

enum class SkepticKind { slln, twosided, testfn, mixture, zero };

struct SkepticSpec {
  SkepticKind kind = SkepticKind::slln;
  double eps = 0.1;
  TestFunction tf;              // testfn
  std::string mixture_file;     // mixture descriptor path; empty = default grid
  int mixture_centers = 11;
  double mixture_width = 0.05;
  int mixture_eps_levels = 1;
};

// "kind" or "kind:key=value,key=value". Keys: eps, center, width, file,
// centers, eps_levels.
SkepticSpec parse_skeptic_spec(const std::string& text);

std::unique_ptr<ForecasterStrategy> make_forecaster(const ForecasterSpec& spec);
std::unique_ptr<SkepticStrategy> make_skeptic(const SkepticSpec& spec);

// Mixture descriptor file: JSON object with keys
//   eps (number), width (number), centers (array of numbers),
//   both_signs (bool, default true), weights (optional array, must sum to 1).
MixtureSpec read_mixture_descriptor(const std::string& path);

struct ExperimentConfig {
  ForecasterSpec forecaster;
  RealitySpec reality;
  std::vector<SkepticSpec> skeptics;  // index 0 is the designated skeptic
  std::size_t rounds = 1000;
  std::uint64_t seed = 1;
  std::string trajectory_path = "trajectory.csv";
  std::string summary_path = "summary.json";
  std::string history_path;  // optional JSON-lines dump of the played rounds
};

// Runs one game and writes the trajectory CSV (columns: round, p, y,
// x0..x{d-1} when objects are present, running_bias, one capital column per
// skeptic) plus a JSON summary. Deterministic given config and seed.
void cmd_run(const ExperimentConfig& cfg);

struct DuelConfig {
  ForecasterSpec forecaster_a;
  ForecasterSpec forecaster_b;
  RealitySpec reality;  // must be forecast-independent (no dawid)
  std::size_t rounds = 1000;
  std::uint64_t seed = 1;
  std::string trajectory_path = "duel.csv";
  std::string summary_path = "duel_summary.json";
};

struct DuelSummary {
  double mean_abs_diff = 0.0;
  double max_abs_diff = 0.0;
};

// Both forecasters face the identical (object, label) stream, materialized
// once. CSV columns: round, p_a, p_b, y, abs_diff (+ objects when present).
DuelSummary cmd_duel(const DuelConfig& cfg);

struct PlotConfig {
  std::string input_csv;
  std::vector<std::string> columns;
  std::string output_path = "chart.svg";
};

// Renders selected columns against round index as one SVG polyline per
// column on a fixed 800x400 canvas.
void cmd_plot(const PlotConfig& cfg);

struct CalibrateConfig {
  std::string input_csv;  // needs p and y columns
  int bins = 20;
  std::string output_path = "bins.csv";
};

void cmd_calibrate(const CalibrateConfig& cfg);

struct ValidityConfig {
  SkepticSpec skeptic;
  double theta = 0.5;
  std::size_t rounds = 100;
  std::size_t runs = 10000;
  std::uint64_t seed = 1;
  double threshold = 2.0;
  std::string summary_path = "validity.json";
};

ValidityReport cmd_validity(const ValidityConfig& cfg);

}  // namespace k29
