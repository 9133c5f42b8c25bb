#include "k29/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "k29/forecaster.hpp"
#include "k29/reality.hpp"
#include "k29/rng.hpp"

namespace k29 {

std::vector<double> bias_trace(const History& history) {
  std::vector<double> trace;
  trace.reserve(history.size());
  double sum = 0.0;
  for (std::size_t n = 0; n < history.size(); ++n) {
    sum += history[n].label - history[n].forecast;
    trace.push_back(sum / static_cast<double>(n + 1));
  }
  return trace;
}

namespace {

// Bins are right-closed except the first: bin k covers (k/B, (k+1)/B],
// bin 0 covers [0, 1/B].
std::size_t bin_of(double p, int bin_count) {
  const double scaled = std::ceil(p * bin_count) - 1.0;
  const auto idx = static_cast<long>(scaled);
  if (idx < 0) return 0;
  if (idx >= bin_count) return static_cast<std::size_t>(bin_count - 1);
  return static_cast<std::size_t>(idx);
}

void check_eps_positive(double eps) {
  if (!(eps > 0.0 && eps <= 0.5))
    throw std::invalid_argument("bound check: eps must be in (0, 0.5]");
}

}  // namespace

std::vector<CalibrationBin> calibration_report(const History& history, int bin_count) {
  if (bin_count < 1)
    throw std::invalid_argument("calibration_report: bin_count must be >= 1");
  std::vector<CalibrationBin> bins(static_cast<std::size_t>(bin_count));
  for (int k = 0; k < bin_count; ++k) {
    bins[k].lower = static_cast<double>(k) / bin_count;
    bins[k].upper = static_cast<double>(k + 1) / bin_count;
  }
  for (const Round& r : history) {
    CalibrationBin& b = bins[bin_of(r.forecast, bin_count)];
    ++b.count;
    b.mean_forecast += r.forecast;
    b.mean_label += r.label;
  }
  for (CalibrationBin& b : bins) {
    if (b.count == 0) continue;
    b.mean_forecast /= static_cast<double>(b.count);
    b.mean_label /= static_cast<double>(b.count);
    b.gap = b.mean_label - b.mean_forecast;
  }
  return bins;
}

BoundReport slln_bound_check(const History& history, double eps) {
  check_eps_positive(eps);
  BoundReport report;
  double capital = 1.0;
  double sup = 1.0;
  double residual_sum = 0.0;
  for (const Round& r : history) {
    capital *= 1.0 + eps * (r.label - r.forecast);
    sup = std::max(sup, capital);
    residual_sum += r.label - r.forecast;
  }
  report.c_observed = sup;
  if (history.empty()) {
    report.lhs = 0.0;
    report.rhs = std::numeric_limits<double>::infinity();
    return report;
  }
  const auto n = static_cast<double>(history.size());
  report.lhs = residual_sum / n;
  report.rhs = std::log(sup) / (eps * n) + eps;
  report.holds = report.lhs <= report.rhs;
  return report;
}

BoundReport calibration_bound_check(const History& history, double eps,
                                    const TestFunction& tf) {
  check_eps_positive(eps);
  tf.validate();
  BoundReport report;
  double capital = 1.0;
  double sup = 1.0;
  double weighted_residuals = 0.0;
  double weight_sum = 0.0;
  for (const Round& r : history) {
    const double w = eval_test_function(tf, r.forecast, &r.object);
    capital *= 1.0 + eps * w * (r.label - r.forecast);
    sup = std::max(sup, capital);
    weighted_residuals += w * (r.label - r.forecast);
    weight_sum += w;
  }
  report.c_observed = sup;
  if (weight_sum <= 1e-12) {  // no round inside the bump's support
    report.applicable = false;
    report.lhs = 0.0;
    report.rhs = std::numeric_limits<double>::infinity();
    return report;
  }
  report.lhs = weighted_residuals / weight_sum;
  report.rhs = std::log(sup) / (eps * weight_sum) + eps;
  report.holds = report.lhs <= report.rhs;
  return report;
}

ValidityReport validity_mc(const SkepticFactory& skeptic_factory, double theta,
                           std::size_t rounds, std::size_t runs, std::uint64_t seed,
                           double threshold) {
  if (runs < 1) throw std::invalid_argument("validity_mc: runs must be >= 1");
  std::vector<double> finals(runs);
  std::size_t tail_hits = 0;

  for (std::size_t run = 0; run < runs; ++run) {
    auto forecaster = make_constant_forecaster(theta);
    auto skeptic = skeptic_factory();
    auto reality = make_bernoulli_reality(theta);
    SkepticStrategy* raw[] = {skeptic.get()};
    GameConfig cfg;
    cfg.rounds = rounds;
    cfg.seed = derive_seed(seed, run);
    const GameResult result =
        run_game(*forecaster, std::span<SkepticStrategy* const>(raw), *reality, cfg);
    const auto& values = result.ledgers.front().values;
    finals[run] = values.back();
    double sup = 0.0;
    for (double v : values) sup = std::max(sup, v);
    if (sup >= threshold) ++tail_hits;
  }

  ValidityReport report;
  report.runs = runs;
  report.threshold = threshold;
  double sum = 0.0;
  for (double v : finals) sum += v;
  report.mean_final_capital = sum / static_cast<double>(runs);
  if (runs > 1) {
    double sq = 0.0;
    for (double v : finals) {
      const double d = v - report.mean_final_capital;
      sq += d * d;
    }
    report.std_error =
        std::sqrt(sq / static_cast<double>(runs - 1)) / std::sqrt(static_cast<double>(runs));
  }
  report.tail_freq = static_cast<double>(tail_hits) / static_cast<double>(runs);
  return report;
}

}  // namespace k29
