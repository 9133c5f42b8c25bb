#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "k29/protocol.hpp"
#include "k29/skeptic.hpp"
#include "k29/types.hpp"

namespace k29 {

// Running averages (1/n) sum_{i<=n} (y_i - p_i), one entry per round.
std::vector<double> bias_trace(const History& history);

struct CalibrationBin {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t count = 0;
  double mean_forecast = 0.0;
  double mean_label = 0.0;
  double gap = 0.0;  // mean_label - mean_forecast; 0 for empty bins
};

// Equal-width bins over [0,1], right-closed except the first, so every round
// lands in exactly one bin.
std::vector<CalibrationBin> calibration_report(const History& history, int bin_count);

// Arithmetic consequence of a bounded capital product: with
// C = sup over prefixes of prod(1 + eps (y_i - p_i)),
//   (1/n) sum (y_i - p_i)  <=  ln C / (eps n) + eps
// holds for every history and eps in (0, 0.5].
struct BoundReport {
  double c_observed = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
  bool applicable = true;  // calibration variant: false when sum I(p_i) ~ 0
};

BoundReport slln_bound_check(const History& history, double eps);

// Test-function-weighted variant:
//   sum I(p_i)(y_i - p_i) / sum I(p_i)  <=  ln C / (eps sum I(p_i)) + eps.
// Reported not-applicable when sum I(p_i) is numerically zero.
BoundReport calibration_bound_check(const History& history, double eps,
                                    const TestFunction& tf);

// Monte Carlo check of the testing interpretation: against a forecaster that
// announces the true theta, any legal skeptic's capital is a nonnegative
// martingale, so E[K_n] = 1 and P(sup K >= C) <= 1/C.
struct ValidityReport {
  double mean_final_capital = 0.0;
  double std_error = 0.0;
  double tail_freq = 0.0;  // fraction of runs with sup_n K_n >= threshold
  double threshold = 2.0;
  std::size_t runs = 0;
};

using SkepticFactory = std::function<std::unique_ptr<SkepticStrategy>()>;

ValidityReport validity_mc(const SkepticFactory& skeptic_factory, double theta,
                           std::size_t rounds, std::size_t runs, std::uint64_t seed,
                           double threshold = 2.0);

}  // namespace k29
