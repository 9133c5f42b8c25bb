#include "k29/protocol.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace k29 {

double update_capital(double k_prev, double stake, int label, double forecast) {
  return k_prev + stake * (static_cast<double>(label) - forecast);
}

double update_capital(double k_prev, const SkepticFunction& s_fn, double forecast,
                      int label) {
  return update_capital(k_prev, s_fn(forecast), label, forecast);
}

bool stake_is_legal(double k_prev, double stake, double forecast) {
  return k_prev + stake * (1.0 - forecast) >= 0.0 && k_prev - stake * forecast >= 0.0;
}

bool stake_is_legal(const CapitalLedger& ledger, double stake, double forecast) {
  if (ledger.values.empty())
    throw std::invalid_argument("stake_is_legal: empty ledger");
  return stake_is_legal(ledger.values.back(), stake, forecast);
}

namespace {

[[noreturn]] void violation(const std::string& who, std::size_t round,
                            const std::string& what) {
  std::ostringstream msg;
  msg << "protocol violation by " << who << " at round " << round << ": " << what;
  throw ProtocolViolation(msg.str());
}

}  // namespace

GameResult run_game(ForecasterStrategy& forecaster,
                    std::span<SkepticStrategy* const> skeptics,
                    RealityStrategy& reality, const GameConfig& cfg) {
  if (cfg.rounds < 1)
    throw std::invalid_argument("run_game: rounds must be >= 1");
  if (!skeptics.empty() && cfg.defended_skeptic >= skeptics.size())
    throw std::invalid_argument("run_game: defended_skeptic out of range");

  GameResult result;
  result.history.reserve(cfg.rounds);
  result.ledgers.resize(skeptics.size());
  for (std::size_t k = 0; k < skeptics.size(); ++k)
    result.ledgers[k].restriction = skeptics[k]->restriction();

  reality.reset(cfg.seed);

  Eigen::Index dim = -1;  // fixed by the first object
  std::vector<SkepticFunction> announced(skeptics.size());

  for (std::size_t n = 1; n <= cfg.rounds; ++n) {
    Eigen::VectorXd object = reality.present_object(n - 1);
    if (!object.allFinite())
      violation(reality.name(), n, "non-finite object entries");
    if (dim < 0)
      dim = object.size();
    else if (object.size() != dim)
      violation(reality.name(), n, "object dimension changed mid-game");

    for (std::size_t k = 0; k < skeptics.size(); ++k)
      announced[k] = skeptics[k]->announce(result.history, object);

    const SkepticFunction* shown =
        skeptics.empty() ? nullptr : &announced[cfg.defended_skeptic];
    const double p = forecaster.choose(result.history, object, shown);
    if (!is_valid_forecast(p))
      violation(forecaster.name(), n,
                "forecast " + std::to_string(p) + " outside [0, 1]");

    const int y = reality.choose_label(n - 1, result.history, p);
    if (!is_valid_label(y))
      violation(reality.name(), n, "label " + std::to_string(y) + " not in {0, 1}");

    for (std::size_t k = 0; k < skeptics.size(); ++k) {
      CapitalLedger& ledger = result.ledgers[k];
      const double stake = announced[k](p);
      if (!std::isfinite(stake))
        violation(skeptics[k]->name(), n, "non-finite stake");
      if (ledger.restriction == StakeRestriction::nonnegative_capital &&
          !stake_is_legal(ledger, stake, p))
        violation(skeptics[k]->name(), n,
                  "stake " + std::to_string(stake) +
                      " risks negative capital at forecast " + std::to_string(p));
      ledger.values.push_back(update_capital(ledger.values.back(), stake, y, p));
    }

    result.history.push_back(Round{std::move(object), p, y});
  }
  return result;
}

GameResult run_game(ForecasterStrategy& forecaster,
                    const std::vector<std::unique_ptr<SkepticStrategy>>& skeptics,
                    RealityStrategy& reality, const GameConfig& cfg) {
  std::vector<SkepticStrategy*> raw;
  raw.reserve(skeptics.size());
  for (const auto& s : skeptics) raw.push_back(s.get());
  return run_game(forecaster, std::span<SkepticStrategy* const>(raw), reality, cfg);
}

}  // namespace k29
