#include <doctest.h>

#include <cmath>

#include "k29/metrics.hpp"
#include "test_util.hpp"

using namespace k29;
using testutil::history_of;
using testutil::random_history;

TEST_CASE("bias trace") {
  CHECK(bias_trace({}).empty());
  const auto one = bias_trace(history_of({{0.5, 1}}));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == 0.5);

  SUBCASE("forecasts equal to labels give zero bias") {
    const auto trace = bias_trace(history_of({{1.0, 1}, {0.0, 0}, {1.0, 1}}));
    for (double v : trace) CHECK(v == 0.0);
  }
  SUBCASE("matches a single-pass summation oracle") {
    SplitMix64 rng(1234);
    const History h = random_history(rng, 1000);
    const auto trace = bias_trace(h);
    double sum = 0.0;
    for (std::size_t n = 0; n < h.size(); ++n) {
      sum += h[n].label - h[n].forecast;
      CHECK(std::abs(trace[n] - sum / static_cast<double>(n + 1)) <= 1e-12);
      CHECK(std::abs(trace[n]) <= 1.0);
    }
  }
}

TEST_CASE("calibration report") {
  SUBCASE("single bin reduces to the overall means") {
    const History h = history_of({{0.2, 1}, {0.6, 0}, {0.9, 1}});
    const auto bins = calibration_report(h, 1);
    REQUIRE(bins.size() == 1);
    CHECK(bins[0].count == 3);
    CHECK(std::abs(bins[0].mean_forecast - (0.2 + 0.6 + 0.9) / 3) <= 1e-15);
    CHECK(std::abs(bins[0].mean_label - 2.0 / 3) <= 1e-15);
    CHECK(std::abs(bins[0].gap - (2.0 / 3 - (0.2 + 0.6 + 0.9) / 3)) <= 1e-15);
  }
  SUBCASE("constant-label history fills one bin") {
    const History h = history_of({{0.52, 1}, {0.54, 1}, {0.58, 1}});
    const auto bins = calibration_report(h, 20);
    const auto& b = bins[11];  // (0.55, 0.6] holds 0.58; (0.5,0.55] holds the rest
    CHECK(bins[10].count == 2);
    CHECK(bins[10].mean_label == 1.0);
    CHECK(b.count == 1);
    CHECK(b.mean_label == 1.0);
  }
  SUBCASE("every round lands in exactly one bin and edges are right-closed") {
    SplitMix64 rng(88);
    History h = random_history(rng, 5000);
    // salt with exact edges
    h.push_back(testutil::round(0.0, 1));
    h.push_back(testutil::round(1.0, 0));
    h.push_back(testutil::round(0.05, 1));
    h.push_back(testutil::round(0.0500000001, 0));
    for (int bins_n : {1, 7, 20}) {
      const auto bins = calibration_report(h, bins_n);
      std::size_t total = 0;
      for (const auto& b : bins) total += b.count;
      CHECK(total == h.size());
    }
    const auto bins = calibration_report(h, 20);
    CHECK(bins[0].lower == 0.0);
    CHECK(bins[19].upper == 1.0);
  }
  SUBCASE("p = 0.05 lands in the first of 20 bins, just above goes to the second") {
    const auto bins =
        calibration_report(history_of({{0.05, 1}, {0.0500000001, 0}}), 20);
    CHECK(bins[0].count == 1);
    CHECK(bins[1].count == 1);
  }
  SUBCASE("a perfectly calibrated stream has small gaps in full bins") {
    SplitMix64 rng(4242);
    History h;
    for (int i = 0; i < 100000; ++i) {
      const double p = rng.next_unit();
      h.push_back(testutil::round(p, rng.next_bernoulli(p)));
    }
    for (const auto& b : calibration_report(h, 20))
      if (b.count >= 500) CHECK(std::abs(b.gap) <= 0.05);  // ~3/sqrt(count) noise
  }
  SUBCASE("bin_count must be positive") {
    CHECK_THROWS_AS(calibration_report({}, 0), std::invalid_argument);
  }
}

TEST_CASE("slln bound check") {
  SUBCASE("single round example") {
    const auto report = slln_bound_check(history_of({{0.5, 1}}), 0.5);
    CHECK(std::abs(report.c_observed - 1.25) <= 1e-15);
    CHECK(report.lhs == 0.5);
    CHECK(std::abs(report.rhs - (std::log(1.25) / 0.5 + 0.5)) <= 1e-12);
    CHECK(report.holds);
  }
  SUBCASE("perfect forecasts give zero bias") {
    const auto report = slln_bound_check(history_of({{1.0, 1}, {1.0, 1}}), 0.3);
    CHECK(report.lhs == 0.0);
    CHECK(report.holds);
  }
  SUBCASE("holds on every random history") {
    SplitMix64 rng(2);
    for (int trial = 0; trial < 10000; ++trial) {
      const History h = random_history(rng, 1 + (rng.next_u64() % 60));
      const double eps = 0.01 + 0.49 * rng.next_unit();
      CHECK(slln_bound_check(h, eps).holds);
    }
  }
  SUBCASE("eps out of range is rejected") {
    CHECK_THROWS_AS(slln_bound_check({}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(slln_bound_check({}, 0.6), std::invalid_argument);
  }
}

TEST_CASE("calibration bound check") {
  SUBCASE("a flat test function reduces to the slln check") {
    SplitMix64 rng(6);
    const History h = random_history(rng, 50);
    const TestFunction flat{0.5, 1e9, std::nullopt};
    const auto a = calibration_bound_check(h, 0.25, flat);
    const auto b = slln_bound_check(h, 0.25);
    CHECK(a.applicable);
    CHECK(std::abs(a.lhs - b.lhs) <= 1e-9);
    CHECK(std::abs(a.rhs - b.rhs) <= 1e-9);
  }
  SUBCASE("history outside the bump's support is not applicable") {
    const History h = history_of({{1.0, 1}, {0.95, 1}});
    const TestFunction narrow{0.0, 0.01, std::nullopt};
    const auto report = calibration_bound_check(h, 0.25, narrow);
    CHECK_FALSE(report.applicable);
    CHECK(report.holds);
  }
  SUBCASE("holds on every random history and bump") {
    SplitMix64 rng(3);
    std::size_t applicable = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      const History h = random_history(rng, 1 + (rng.next_u64() % 60));
      const double eps = 0.01 + 0.49 * rng.next_unit();
      const TestFunction tf{rng.next_unit(), 0.02 + 0.3 * rng.next_unit(),
                            std::nullopt};
      const auto report = calibration_bound_check(h, eps, tf);
      CHECK(report.holds);
      applicable += report.applicable;
    }
    CHECK(applicable > 9000);  // the sweep should mostly be in-support
  }
}

TEST_CASE("validity monte carlo") {
  SUBCASE("a zero-stake skeptic keeps capital at exactly 1") {
    const auto report = validity_mc([] { return make_zero_skeptic(); }, 0.5, 20, 200,
                                    9, 2.0);
    CHECK(report.mean_final_capital == 1.0);
    CHECK(report.std_error == 0.0);
    CHECK(report.tail_freq == 0.0);
  }
  SUBCASE("slln capital is a martingale with the Doob tail bound") {
    const auto report = validity_mc([] { return make_slln_skeptic(0.1); }, 0.5, 100,
                                    4000, 77, 2.0);
    CHECK(std::abs(report.mean_final_capital - 1.0) <= 4.0 * report.std_error);
    CHECK(report.tail_freq <= 0.5 + 3.0 * std::sqrt(0.25 / 4000.0));
  }
  SUBCASE("deterministic given the seed") {
    const auto a = validity_mc([] { return make_slln_skeptic(0.2); }, 0.3, 50, 500,
                               123, 1.5);
    const auto b = validity_mc([] { return make_slln_skeptic(0.2); }, 0.3, 50, 500,
                               123, 1.5);
    CHECK(a.mean_final_capital == b.mean_final_capital);
    CHECK(a.tail_freq == b.tail_freq);
  }
}
