#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "k29/protocol.hpp"
#include "k29/types.hpp"

namespace k29 {

// Betting aggressiveness of the capital-product strategies. The sign picks
// the direction (betting on labels running above or below the forecasts);
// the magnitude must stay in (0, 0.5] so every capital factor
// 1 + eps I (y - p) is at least 1/2 and the log-domain products are safe.
struct EpsilonParam {
  double value = 0.1;

  void validate() const;
};

// Continuous fuzzy indicator of a forecast neighborhood: a Gaussian bump
// exp(-(p-c)^2 / (2 width^2)) peaking at 1, optionally multiplied by a bump
// in object space to localize the calibration test around an object.
struct TestFunction {
  struct ObjectProfile {
    Eigen::VectorXd reference;
    double width = 1.0;
  };

  double center = 0.5;
  double width = 0.1;
  std::optional<ObjectProfile> object_profile;

  void validate() const;
};

// I(p, x) in [0, 1]; the object pointer is required iff the test function
// carries an object profile.
double eval_test_function(const TestFunction& tf, double p,
                          const Eigen::VectorXd* x = nullptr);

// Capital of the one-sided capital-product strategy after `history`:
// prod_i (1 + eps (y_i - p_i)), accumulated in log domain. 1 on empty history.
double slln_capital(const History& history, double eps);

// Stake of the one-sided strategy for the next round: eps * capital so far.
double slln_stake(const History& history, EpsilonParam eps);

// Two-account strategy: constant function
// p -> eps (prod(1 + eps(y_i - p_i)) - prod(1 + eps(p_i - y_i))).
SkepticFunction two_sided_fn(const History& history, double eps);

// Capital of the test-function strategy: prod_i (1 + eps I(p_i, x_i)(y_i - p_i)).
double test_fn_capital(const History& history, double eps, const TestFunction& tf);

// Calibration strategy p -> eps I(p, x_now) prod_i (1 + eps I(p_i, x_i)(y_i - p_i)).
// The object-free form ignores x_now.
SkepticFunction test_fn_strategy(const History& history, const Eigen::VectorXd& x_now,
                                 EpsilonParam eps, const TestFunction& tf);

// A skeptic strategy kernel: produces this round's function from the history
// and the current object.
using SkepticRule =
    std::function<SkepticFunction(const History&, const Eigen::VectorXd&)>;

// Convex mixture of skeptic rules; weights are positive and sum to 1
// within 1e-12 (checked when the mixture is evaluated).
struct MixtureSpec {
  std::vector<SkepticRule> components;
  std::vector<double> weights;

  void validate() const;
};

SkepticFunction mixture_fn(const MixtureSpec& mix, const History& history,
                           const Eigen::VectorXd& x_now);

// Uniform mixture over `num_centers` bump centers spread evenly on [0,1],
// both betting directions, and `eps_levels` magnitudes eps, eps/2, eps/4, ...
MixtureSpec calibration_mixture_grid(int num_centers, double width, double eps,
                                     int eps_levels = 1);

// --- Game-strategy adapters ------------------------------------------------

// Plays the restricted scalar-stake protocol (constant announced function).
std::unique_ptr<SkepticStrategy> make_slln_skeptic(double eps);
std::unique_ptr<SkepticStrategy> make_two_sided_skeptic(double eps);
std::unique_ptr<SkepticStrategy> make_test_fn_skeptic(double eps, TestFunction tf);
std::unique_ptr<SkepticStrategy> make_mixture_skeptic(MixtureSpec mix);
// Never bets; capital stays at 1.
std::unique_ptr<SkepticStrategy> make_zero_skeptic();

}  // namespace k29
