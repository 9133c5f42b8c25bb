#include <doctest.h>

#include <cmath>

#include "k29/forecaster.hpp"
#include "k29/protocol.hpp"
#include "k29/reality.hpp"
#include "k29/skeptic.hpp"
#include "test_util.hpp"

using namespace k29;
using testutil::history_of;

namespace {

class BadForecaster final : public ForecasterStrategy {
 public:
  std::string name() const override { return "bad-forecaster"; }
  double choose(const History&, const Eigen::VectorXd&, const SkepticFunction*) override {
    return 1.5;
  }
};

class BadReality final : public RealityStrategy {
 public:
  std::string name() const override { return "bad-reality"; }
  Eigen::VectorXd present_object(std::size_t) override { return {}; }
  int choose_label(std::size_t, const History&, double) override { return 2; }
};

class GreedyStakeSkeptic final : public SkepticStrategy {
 public:
  std::string name() const override { return "greedy"; }
  StakeRestriction restriction() const override {
    return StakeRestriction::nonnegative_capital;
  }
  SkepticFunction announce(const History&, const Eigen::VectorXd&) override {
    return SkepticFunction{[](double) { return 3.0; }, true};
  }
};

class DimensionFlipReality final : public RealityStrategy {
 public:
  std::string name() const override { return "dim-flip"; }
  Eigen::VectorXd present_object(std::size_t round_index) override {
    Eigen::VectorXd x(round_index == 0 ? 1 : 2);
    x.setZero();
    return x;
  }
  int choose_label(std::size_t, const History&, double) override { return 0; }
};

}  // namespace

TEST_CASE("capital update with scalar stakes") {
  CHECK(update_capital(1.0, 0.0, 1, 0.5) == 1.0);
  CHECK(update_capital(1.0, 0.5, 1, 0.5) == 1.25);
  CHECK(update_capital(2.0, -1.0, 0, 0.3) == doctest::Approx(2.3).epsilon(1e-15));
}

TEST_CASE("capital update with announced functions") {
  const SkepticFunction zero{[](double) { return 0.0; }, true};
  CHECK(update_capital(1.0, zero, 0.7, 1) == 1.0);
  const SkepticFunction ident{[](double p) { return p; }, true};
  CHECK(update_capital(1.0, ident, 0.5, 0) == 0.75);
  // forecasting at the root leaves capital unchanged
  const SkepticFunction shifted{[](double p) { return p - 0.3; }, true};
  CHECK(update_capital(1.0, shifted, 0.3, 1) == 1.0);
}

TEST_CASE("stake legality under the nonnegative-capital restriction") {
  CHECK_FALSE(stake_is_legal(1.0, 3.0, 0.5));  // y=0 would give 1 - 1.5 < 0
  CHECK(stake_is_legal(1.0, 2.0, 0.5));        // worst case exactly 0
  CHECK(stake_is_legal(1.0, 1.0, 0.5));
  CHECK(stake_is_legal(0.0, 0.0, 0.2));
  CHECK_FALSE(stake_is_legal(1.0, -3.0, 0.5));  // y=1 side goes negative

  CapitalLedger ledger;
  CHECK(stake_is_legal(ledger, 1.0, 0.5));
  ledger.values.clear();
  CHECK_THROWS_AS(stake_is_legal(ledger, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("run_game rejects zero rounds") {
  auto forecaster = make_constant_forecaster(0.5);
  auto reality = make_bernoulli_reality(0.5);
  GameConfig cfg;
  cfg.rounds = 0;
  CHECK_THROWS_AS(
      run_game(*forecaster, std::vector<std::unique_ptr<SkepticStrategy>>{}, *reality,
               cfg),
      std::invalid_argument);
}

TEST_CASE("single round with no skeptics") {
  auto forecaster = make_constant_forecaster(0.5);
  auto reality = make_bernoulli_reality(0.5);
  GameConfig cfg;
  cfg.rounds = 1;
  cfg.seed = 11;
  const GameResult result = run_game(
      *forecaster, std::vector<std::unique_ptr<SkepticStrategy>>{}, *reality, cfg);
  CHECK(result.history.size() == 1);
  CHECK(result.ledgers.empty());
  CHECK(result.history[0].forecast == 0.5);
  CHECK(is_valid_label(result.history[0].label));
}

TEST_CASE("equal seeds give bit-identical histories") {
  const auto play = [] {
    auto forecaster = make_laplace_forecaster();
    auto reality = make_bernoulli_reality(0.4);
    std::vector<std::unique_ptr<SkepticStrategy>> skeptics;
    skeptics.push_back(make_slln_skeptic(0.25));
    GameConfig cfg;
    cfg.rounds = 200;
    cfg.seed = 77;
    return run_game(*forecaster, skeptics, *reality, cfg);
  };
  const GameResult a = play();
  const GameResult b = play();
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].forecast == b.history[i].forecast);
    CHECK(a.history[i].label == b.history[i].label);
  }
  CHECK(a.ledgers[0].values == b.ledgers[0].values);
}

TEST_CASE("defensive play keeps the designated skeptic's capital non-increasing") {
  std::vector<std::unique_ptr<SkepticStrategy>> skeptics;
  skeptics.push_back(make_test_fn_skeptic(0.3, TestFunction{0.4, 0.15, std::nullopt}));
  RootSolverConfig solver;
  solver.bisection_iters = 40;
  auto forecaster = make_defensive_forecaster(solver);
  auto reality = make_bernoulli_reality(0.7);
  GameConfig cfg;
  cfg.rounds = 1000;
  cfg.seed = 5;
  const GameResult result = run_game(*forecaster, skeptics, *reality, cfg);
  const auto& k = result.ledgers[0].values;
  for (std::size_t n = 1; n < k.size(); ++n) CHECK(k[n] <= k[n - 1] + 1e-9);
  CHECK(k.back() <= 1.0 + 1e-6);
}

TEST_CASE("protocol violations name the offender") {
  GameConfig cfg;
  cfg.rounds = 3;
  cfg.seed = 1;

  SUBCASE("out-of-range forecast") {
    BadForecaster forecaster;
    auto reality = make_bernoulli_reality(0.5);
    CHECK_THROWS_WITH_AS(
        run_game(forecaster, std::vector<std::unique_ptr<SkepticStrategy>>{}, *reality,
                 cfg),
        doctest::Contains("bad-forecaster"), ProtocolViolation);
  }
  SUBCASE("non-binary label") {
    auto forecaster = make_constant_forecaster(0.5);
    BadReality reality;
    CHECK_THROWS_WITH_AS(
        run_game(*forecaster, std::vector<std::unique_ptr<SkepticStrategy>>{}, reality,
                 cfg),
        doctest::Contains("bad-reality"), ProtocolViolation);
  }
  SUBCASE("illegal stake under the restriction") {
    auto forecaster = make_constant_forecaster(0.5);
    auto reality = make_bernoulli_reality(0.5);
    GreedyStakeSkeptic greedy;
    SkepticStrategy* raw[] = {&greedy};
    CHECK_THROWS_WITH_AS(
        run_game(*forecaster, std::span<SkepticStrategy* const>(raw), *reality, cfg),
        doctest::Contains("greedy"), ProtocolViolation);
  }
  SUBCASE("object dimension change") {
    auto forecaster = make_constant_forecaster(0.5);
    DimensionFlipReality reality;
    cfg.rounds = 2;
    CHECK_THROWS_WITH_AS(
        run_game(*forecaster, std::vector<std::unique_ptr<SkepticStrategy>>{}, reality,
                 cfg),
        doctest::Contains("dim-flip"), ProtocolViolation);
  }
}

TEST_CASE("ledger deltas equal the announced function at the played forecast") {
  std::vector<std::unique_ptr<SkepticStrategy>> skeptics;
  skeptics.push_back(make_test_fn_skeptic(0.25, TestFunction{0.5, 0.2, std::nullopt}));
  skeptics.push_back(make_slln_skeptic(0.1));
  auto forecaster = make_laplace_forecaster();
  auto reality = make_bernoulli_reality(0.6);
  GameConfig cfg;
  cfg.rounds = 120;
  cfg.seed = 3;
  const GameResult result = run_game(*forecaster, skeptics, *reality, cfg);

  // Strategies are pure functions of the history prefix, so re-announcing on
  // the recorded prefix must reproduce each recorded capital step exactly.
  History prefix;
  for (std::size_t n = 0; n < result.history.size(); ++n) {
    const Round& r = result.history[n];
    for (std::size_t k = 0; k < skeptics.size(); ++k) {
      const SkepticFunction fn = skeptics[k]->announce(prefix, r.object);
      const double expected =
          update_capital(result.ledgers[k].values[n], fn(r.forecast), r.label,
                         r.forecast);
      CHECK(result.ledgers[k].values[n + 1] == expected);
    }
    prefix.push_back(r);
  }
}

TEST_CASE("restricted skeptics never see negative capital") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    std::vector<std::unique_ptr<SkepticStrategy>> skeptics;
    skeptics.push_back(make_slln_skeptic(0.5));
    skeptics.push_back(make_slln_skeptic(-0.5));
    auto forecaster = make_laplace_forecaster();
    auto reality = make_bernoulli_reality(0.3);
    GameConfig cfg;
    cfg.rounds = 500;
    cfg.seed = seed;
    const GameResult result = run_game(*forecaster, skeptics, *reality, cfg);
    for (const CapitalLedger& ledger : result.ledgers)
      for (double v : ledger.values) CHECK(v >= 0.0);
  }
}

TEST_CASE("defending against the one-sided stake strategy forces p = 1") {
  // The announced function is a positive constant, so the root search hits
  // its always-positive branch every round.
  std::vector<std::unique_ptr<SkepticStrategy>> skeptics;
  skeptics.push_back(make_slln_skeptic(0.2));
  auto forecaster = make_defensive_forecaster(RootSolverConfig{});
  auto reality = make_bernoulli_reality(0.5);
  GameConfig cfg;
  cfg.rounds = 50;
  cfg.seed = 21;
  const GameResult result = run_game(*forecaster, skeptics, *reality, cfg);
  for (const Round& r : result.history) CHECK(r.forecast == 1.0);
  const auto& k = result.ledgers[0].values;
  for (std::size_t n = 1; n < k.size(); ++n) CHECK(k[n] <= k[n - 1]);
}

TEST_CASE("only the designated skeptic is defended against") {
  // Two test-function skeptics with different centers: the defended one's
  // capital cannot grow; the other one is free to profit or lose.
  std::vector<std::unique_ptr<SkepticStrategy>> skeptics;
  skeptics.push_back(make_test_fn_skeptic(0.4, TestFunction{0.3, 0.1, std::nullopt}));
  skeptics.push_back(make_test_fn_skeptic(0.4, TestFunction{0.8, 0.1, std::nullopt}));
  RootSolverConfig solver;
  solver.bisection_iters = 40;
  auto forecaster = make_defensive_forecaster(solver);
  auto reality = make_bernoulli_reality(0.5);
  GameConfig cfg;
  cfg.rounds = 400;
  cfg.seed = 9;
  cfg.defended_skeptic = 1;
  const GameResult result = run_game(*forecaster, skeptics, *reality, cfg);
  const auto& defended = result.ledgers[1].values;
  for (std::size_t n = 1; n < defended.size(); ++n)
    CHECK(defended[n] <= defended[n - 1] + 1e-9);
}
