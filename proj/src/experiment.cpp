#include "k29/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "k29/io.hpp"

namespace k29 {

namespace {

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key=value, got '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

}  // namespace

SkepticSpec parse_skeptic_spec(const std::string& text) {
  SkepticSpec spec;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "slln")
    spec.kind = SkepticKind::slln;
  else if (kind == "twosided")
    spec.kind = SkepticKind::twosided;
  else if (kind == "testfn")
    spec.kind = SkepticKind::testfn;
  else if (kind == "mixture")
    spec.kind = SkepticKind::mixture;
  else if (kind == "zero")
    spec.kind = SkepticKind::zero;
  else
    throw std::invalid_argument("unknown skeptic kind '" + kind + "'");
  if (colon == std::string::npos) return spec;

  for (const auto& [key, value] : parse_kv(text.substr(colon + 1))) {
    if (key == "eps")
      spec.eps = to_double(value);
    else if (key == "center" && spec.kind == SkepticKind::testfn)
      spec.tf.center = to_double(value);
    else if (key == "width" && spec.kind == SkepticKind::testfn)
      spec.tf.width = to_double(value);
    else if (key == "width" && spec.kind == SkepticKind::mixture)
      spec.mixture_width = to_double(value);
    else if (key == "centers" && spec.kind == SkepticKind::mixture)
      spec.mixture_centers = static_cast<int>(to_double(value));
    else if (key == "eps_levels" && spec.kind == SkepticKind::mixture)
      spec.mixture_eps_levels = static_cast<int>(to_double(value));
    else if (key == "file" && spec.kind == SkepticKind::mixture)
      spec.mixture_file = value;
    else
      throw std::invalid_argument("skeptic '" + kind + "': unknown key '" + key + "'");
  }
  return spec;
}

std::unique_ptr<ForecasterStrategy> make_forecaster(const ForecasterSpec& spec) {
  switch (spec.kind) {
    case ForecasterKind::k29:
      return make_k29_forecaster(spec.k29);
    case ForecasterKind::laplace:
      return make_laplace_forecaster();
    case ForecasterKind::signlimit:
      return make_sign_limit_forecaster();
    case ForecasterKind::defensive:
      return make_defensive_forecaster(spec.k29.solver);
    case ForecasterKind::constant:
      return make_constant_forecaster(spec.p0);
  }
  throw std::logic_error("make_forecaster: unknown kind");
}

std::unique_ptr<SkepticStrategy> make_skeptic(const SkepticSpec& spec) {
  switch (spec.kind) {
    case SkepticKind::slln:
      return make_slln_skeptic(spec.eps);
    case SkepticKind::twosided:
      return make_two_sided_skeptic(spec.eps);
    case SkepticKind::testfn:
      return make_test_fn_skeptic(spec.eps, spec.tf);
    case SkepticKind::mixture:
      if (!spec.mixture_file.empty())
        return make_mixture_skeptic(read_mixture_descriptor(spec.mixture_file));
      return make_mixture_skeptic(calibration_mixture_grid(
          spec.mixture_centers, spec.mixture_width, spec.eps, spec.mixture_eps_levels));
    case SkepticKind::zero:
      return make_zero_skeptic();
  }
  throw std::logic_error("make_skeptic: unknown kind");
}

MixtureSpec read_mixture_descriptor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mixture descriptor: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("eps") || !j.contains("width") ||
      !j.contains("centers") || !j["centers"].is_array())
    throw ParseError(path + ": need object with eps, width, centers[]");

  const double eps = j["eps"].get<double>();
  const double width = j["width"].get<double>();
  const bool both_signs = j.value("both_signs", true);
  std::vector<double> centers = j["centers"].get<std::vector<double>>();

  MixtureSpec mix;
  std::vector<double> signs = both_signs ? std::vector<double>{1.0, -1.0}
                                         : std::vector<double>{1.0};
  for (double sign : signs)
    for (double center : centers) {
      TestFunction tf{center, width, std::nullopt};
      tf.validate();
      EpsilonParam e{sign * eps};
      e.validate();
      mix.components.push_back([e, tf](const History& h, const Eigen::VectorXd& x) {
        return test_fn_strategy(h, x, e, tf);
      });
    }
  if (j.contains("weights"))
    mix.weights = j["weights"].get<std::vector<double>>();
  else
    mix.weights.assign(mix.components.size(),
                     1.0 / static_cast<double>(mix.components.size()));
  mix.validate();
  return mix;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

void write_trajectory_csv(const std::string& path, const GameResult& result,
                          const std::vector<std::string>& skeptic_names) {
  std::ofstream out = open_out(path);
  const Eigen::Index d = object_dim(result.history);
  out << "round,p,y";
  for (Eigen::Index i = 0; i < d; ++i) out << ",x" << i;
  out << ",running_bias";
  for (std::size_t k = 0; k < skeptic_names.size(); ++k)
    out << ",K" << k << '_' << skeptic_names[k];
  out << '\n';

  const std::vector<double> bias = bias_trace(result.history);
  for (std::size_t n = 0; n < result.history.size(); ++n) {
    const Round& r = result.history[n];
    out << (n + 1) << ',' << format_double(r.forecast) << ',' << r.label;
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_double(r.object[i]);
    out << ',' << format_double(bias[n]);
    for (const CapitalLedger& ledger : result.ledgers)
      out << ',' << format_double(ledger.values[n + 1]);
    out << '\n';
  }
}

nlohmann::json skeptic_summaries(const GameResult& result,
                                 const std::vector<std::string>& names) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t k = 0; k < result.ledgers.size(); ++k) {
    const auto& values = result.ledgers[k].values;
    double sup = 0.0;
    for (double v : values) sup = std::max(sup, v);
    arr.push_back({{"name", names[k]},
                   {"final_capital", values.back()},
                   {"sup_capital", sup}});
  }
  return arr;
}

}  // namespace

void cmd_run(const ExperimentConfig& cfg) {
  auto forecaster = make_forecaster(cfg.forecaster);
  std::vector<std::unique_ptr<SkepticStrategy>> skeptics;
  skeptics.reserve(cfg.skeptics.size());
  for (const SkepticSpec& spec : cfg.skeptics) skeptics.push_back(make_skeptic(spec));
  auto reality = make_reality(cfg.reality);

  GameConfig gc;
  gc.rounds = cfg.rounds;
  gc.seed = cfg.seed;
  const GameResult result = run_game(*forecaster, skeptics, *reality, gc);

  std::vector<std::string> names;
  names.reserve(skeptics.size());
  for (const auto& s : skeptics) names.push_back(s->name());
  write_trajectory_csv(cfg.trajectory_path, result, names);
  if (!cfg.history_path.empty())
    write_history_jsonl_file(result.history, cfg.history_path);

  const std::vector<double> bias = bias_trace(result.history);
  double mean_p = 0.0, mean_y = 0.0;
  for (const Round& r : result.history) {
    mean_p += r.forecast;
    mean_y += r.label;
  }
  mean_p /= static_cast<double>(result.history.size());
  mean_y /= static_cast<double>(result.history.size());

  nlohmann::json summary{{"rounds", cfg.rounds},
                         {"seed", cfg.seed},
                         {"forecaster", forecaster->name()},
                         {"reality", reality->name()},
                         {"final_bias", bias.back()},
                         {"mean_forecast", mean_p},
                         {"label_frequency", mean_y},
                         {"skeptics", skeptic_summaries(result, names)}};
  open_out(cfg.summary_path) << summary.dump(2) << '\n';
}

DuelSummary cmd_duel(const DuelConfig& cfg) {
  if (cfg.reality.kind == RealityKind::dawid)
    throw std::invalid_argument(
        "duel: labels must not depend on forecasts (dawid not allowed)");

  // Materialize the stream once so both forecasters face identical data.
  std::vector<ReplayRecord> stream;
  stream.reserve(cfg.rounds);
  {
    auto reality = make_reality(cfg.reality);
    reality->reset(cfg.seed);
    const History no_history;
    for (std::size_t i = 0; i < cfg.rounds; ++i) {
      ReplayRecord rec;
      rec.object = reality->present_object(i);
      rec.label = reality->choose_label(i, no_history, 0.5);
      stream.push_back(std::move(rec));
    }
  }

  const auto play = [&](const ForecasterSpec& spec) {
    auto forecaster = make_forecaster(spec);
    auto reality = make_replay_reality(stream);
    GameConfig gc;
    gc.rounds = cfg.rounds;
    gc.seed = cfg.seed;
    return run_game(*forecaster, std::vector<std::unique_ptr<SkepticStrategy>>{},
                    *reality, gc);
  };
  const GameResult a = play(cfg.forecaster_a);
  const GameResult b = play(cfg.forecaster_b);

  std::ofstream out = open_out(cfg.trajectory_path);
  const Eigen::Index d = object_dim(a.history);
  out << "round,p_a,p_b,y";
  for (Eigen::Index i = 0; i < d; ++i) out << ",x" << i;
  out << ",abs_diff\n";
  DuelSummary summary;
  double diff_sum = 0.0;
  for (std::size_t n = 0; n < cfg.rounds; ++n) {
    const double pa = a.history[n].forecast;
    const double pb = b.history[n].forecast;
    const double diff = std::abs(pa - pb);
    diff_sum += diff;
    summary.max_abs_diff = std::max(summary.max_abs_diff, diff);
    out << (n + 1) << ',' << format_double(pa) << ',' << format_double(pb) << ','
        << a.history[n].label;
    for (Eigen::Index i = 0; i < d; ++i)
      out << ',' << format_double(a.history[n].object[i]);
    out << ',' << format_double(diff) << '\n';
  }
  summary.mean_abs_diff = diff_sum / static_cast<double>(cfg.rounds);

  nlohmann::json j{{"rounds", cfg.rounds},
                   {"seed", cfg.seed},
                   {"forecaster_a", make_forecaster(cfg.forecaster_a)->name()},
                   {"forecaster_b", make_forecaster(cfg.forecaster_b)->name()},
                   {"mean_abs_diff", summary.mean_abs_diff},
                   {"max_abs_diff", summary.max_abs_diff}};
  open_out(cfg.summary_path) << j.dump(2) << '\n';
  return summary;
}

namespace {

// Fixed 800x400 canvas, linear axes, one polyline per series.
void write_svg(const std::vector<std::string>& names,
               const std::vector<std::vector<double>>& series, std::ostream& out) {
  constexpr double width = 800, height = 400;
  constexpr double ml = 50, mr = 15, mt = 20, mb = 30;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};

  std::size_t n = 0;
  double ymin = 0.0, ymax = 0.0;
  bool first = true;
  for (const auto& s : series) {
    n = std::max(n, s.size());
    for (double v : s) {
      ymin = first ? v : std::min(ymin, v);
      ymax = first ? v : std::max(ymax, v);
      first = false;
    }
  }
  if (first) ymin = 0.0, ymax = 1.0;
  if (ymin == ymax) ymin -= 0.5, ymax += 0.5;

  const auto fx = [&](std::size_t i) {
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    return ml + (width - ml - mr) * static_cast<double>(i) / denom;
  };
  const auto fy = [&](double v) {
    return height - mb - (height - mt - mb) * (v - ymin) / (ymax - ymin);
  };
  const auto coord = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" "
         "viewBox=\"0 0 800 400\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"400\" fill=\"white\"/>\n";
  out << "<rect x=\"" << coord(ml) << "\" y=\"" << coord(mt) << "\" width=\""
      << coord(width - ml - mr) << "\" height=\"" << coord(height - mt - mb)
      << "\" fill=\"none\" stroke=\"#888888\"/>\n";
  out << "<text x=\"4\" y=\"" << coord(mt + 10) << "\" font-size=\"11\">"
      << format_double(ymax) << "</text>\n";
  out << "<text x=\"4\" y=\"" << coord(height - mb) << "\" font-size=\"11\">"
      << format_double(ymin) << "</text>\n";
  out << "<text x=\"" << coord(ml) << "\" y=\"" << coord(height - 8)
      << "\" font-size=\"11\">1</text>\n";
  out << "<text x=\"" << coord(width - mr - 30) << "\" y=\"" << coord(height - 8)
      << "\" font-size=\"11\">" << n << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % (sizeof(palette) / sizeof(palette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" "
        << "points=\"";
    for (std::size_t i = 0; i < series[s].size(); ++i) {
      if (i > 0) out << ' ';
      out << coord(fx(i)) << ',' << coord(fy(series[s][i]));
    }
    out << "\"/>\n";
    out << "<text x=\"" << coord(ml + 8 + 120.0 * static_cast<double>(s)) << "\" y=\""
        << coord(mt - 6) << "\" font-size=\"12\" fill=\"" << color << "\">" << names[s]
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void cmd_plot(const PlotConfig& cfg) {
  if (cfg.columns.empty())
    throw std::invalid_argument("plot: no columns selected");
  const CsvTable table = read_csv_file(cfg.input_csv);
  std::vector<std::vector<double>> series;
  for (const std::string& name : cfg.columns) {
    const std::size_t c = table.column_index(name);
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (const auto& row : table.rows) values.push_back(row[c]);
    series.push_back(std::move(values));
  }
  std::ofstream out = open_out(cfg.output_path);
  write_svg(cfg.columns, series, out);
}

void cmd_calibrate(const CalibrateConfig& cfg) {
  const CsvTable table = read_csv_file(cfg.input_csv);
  const std::size_t p_col = table.column_index("p");
  const std::size_t y_col = table.column_index("y");
  History history;
  history.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Round round;
    round.forecast = table.rows[r][p_col];
    const double y = table.rows[r][y_col];
    if (!is_valid_forecast(round.forecast) || (y != 0.0 && y != 1.0))
      throw ParseError(cfg.input_csv + ":" + std::to_string(r + 2) +
                       ": invalid forecast/label pair");
    round.label = static_cast<int>(y);
    history.push_back(std::move(round));
  }
  std::ofstream out = open_out(cfg.output_path);
  write_bins_csv(calibration_report(history, cfg.bins), out);
}

ValidityReport cmd_validity(const ValidityConfig& cfg) {
  const SkepticSpec spec = cfg.skeptic;
  const ValidityReport report = validity_mc([&spec] { return make_skeptic(spec); },
                                            cfg.theta, cfg.rounds, cfg.runs, cfg.seed,
                                            cfg.threshold);
  nlohmann::json j{{"mean_final_capital", report.mean_final_capital},
                   {"std_error", report.std_error},
                   {"tail_freq", report.tail_freq},
                   {"threshold", report.threshold},
                   {"runs", report.runs},
                   {"rounds", cfg.rounds},
                   {"theta", cfg.theta},
                   {"seed", cfg.seed}};
  open_out(cfg.summary_path) << j.dump(2) << '\n';
  return report;
}

}  // namespace k29
