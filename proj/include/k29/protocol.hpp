#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "k29/types.hpp"

namespace k29 {

// Capital accounting shared by both protocol variants: K_n = K_{n-1} + s (y - p).
double update_capital(double k_prev, double stake, int label, double forecast);

// Function-announcing variant: the stake is the announced function evaluated
// at the actual forecast.
double update_capital(double k_prev, const SkepticFunction& s_fn, double forecast,
                      int label);

// Nonnegative-capital restriction: a stake is legal iff both outcomes
// y in {0,1} keep capital >= 0.
bool stake_is_legal(double k_prev, double stake, double forecast);
bool stake_is_legal(const CapitalLedger& ledger, double stake, double forecast);

// --- Strategy interfaces -------------------------------------------------
//
// Turn order per round: Reality presents the object, every Skeptic announces
// its function, Forecaster announces the forecast (seeing only the designated
// Skeptic's function), Reality announces the label, capital updates.
// Forecast-dependent label rules therefore see the forecast only after it is
// final.

class ForecasterStrategy {
 public:
  virtual ~ForecasterStrategy() = default;
  virtual std::string name() const = 0;
  // `announced` is the designated skeptic's move this round, or nullptr when
  // the game has no skeptics.
  virtual double choose(const History& history, const Eigen::VectorXd& object,
                        const SkepticFunction* announced) = 0;
};

class SkepticStrategy {
 public:
  virtual ~SkepticStrategy() = default;
  virtual std::string name() const = 0;
  virtual StakeRestriction restriction() const { return StakeRestriction::none; }
  virtual SkepticFunction announce(const History& history,
                                   const Eigen::VectorXd& object) = 0;
};

class RealityStrategy {
 public:
  virtual ~RealityStrategy() = default;
  virtual std::string name() const = 0;
  // Called once per game before round 1; stochastic sources reseed here.
  virtual void reset(std::uint64_t /*seed*/) {}
  virtual Eigen::VectorXd present_object(std::size_t round_index) = 0;
  virtual int choose_label(std::size_t round_index, const History& history,
                           double forecast) = 0;
};

// --- Round-loop engine ----------------------------------------------------

struct GameConfig {
  std::size_t rounds = 1;
  std::uint64_t seed = 0;
  std::size_t defended_skeptic = 0;  // index of the skeptic shown to Forecaster
};

struct GameResult {
  History history;
  std::vector<CapitalLedger> ledgers;  // one per skeptic, in input order
};

// Runs `cfg.rounds` rounds in protocol order. Deterministic given the seed
// and strategy configurations. Every skeptic is tracked with its own ledger;
// skeptics with the nonnegative-capital restriction have stake legality
// enforced. Protocol violations abort with the offender's name.
GameResult run_game(ForecasterStrategy& forecaster,
                    std::span<SkepticStrategy* const> skeptics,
                    RealityStrategy& reality, const GameConfig& cfg);

// Convenience for the common no-skeptic / owned-skeptic cases.
GameResult run_game(ForecasterStrategy& forecaster,
                    const std::vector<std::unique_ptr<SkepticStrategy>>& skeptics,
                    RealityStrategy& reality, const GameConfig& cfg);

}  // namespace k29
