#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace k29 {

// One completed game step: object, forecast, label.
struct Round {
  Eigen::VectorXd object;  // size 0 when objects are absent
  double forecast = 0.0;   // in [0, 1]
  int label = 0;           // 0 or 1
};

// Append-only within a game; all objects share one dimension.
using History = std::vector<Round>;

inline bool is_valid_forecast(double p) {
  return std::isfinite(p) && p >= 0.0 && p <= 1.0;
}

inline bool is_valid_label(int y) { return y == 0 || y == 1; }

inline Eigen::Index object_dim(const History& h) {
  return h.empty() ? 0 : h.front().object.size();
}

// Skeptic's move in the function-announcing protocol: a total map from
// candidate forecasts in [0,1] to stakes. Strategies built by this library
// are continuous by construction and say so via the flag.
struct SkepticFunction {
  std::function<double(double)> eval;
  bool declared_continuous = true;

  double operator()(double p) const { return eval(p); }
};

// Whether a skeptic plays under the classic nonnegative-capital restriction
// (scalar-stake protocol) or announces unrestricted functions.
enum class StakeRestriction { none, nonnegative_capital };

// Per-skeptic capital trajectory K_0, K_1, ...; K_0 = 1.
struct CapitalLedger {
  std::vector<double> values{1.0};
  StakeRestriction restriction = StakeRestriction::none;
};

// A strategy broke the rules of the game (out-of-range forecast, non-binary
// label, illegal stake, non-finite values). The message names the offender.
class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; the message carries the line number.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace k29
