#pragma once

#include <memory>

#include "k29/kernels.hpp"
#include "k29/protocol.hpp"
#include "k29/types.hpp"

namespace k29 {

// Root localization over a continuous announced function: scan a uniform
// grid, then bisect the leftmost sign-change bracket.
struct RootSolverConfig {
  int grid_points = 33;       // >= 2, endpoints 0 and 1 included
  int bisection_iters = 10;   // >= 1
  double root_tolerance = 1e-9;

  void validate() const;
};

struct K29Config {
  KernelSpec kernel;
  RootSolverConfig solver;
};

// Picks a forecast that the announced function cannot profit from:
//   - all grid values > 0  -> 1
//   - all grid values < 0  -> 0
//   - any |value| <= root_tolerance -> leftmost such grid point
//   - otherwise bisect the leftmost adjacent sign change and return the
//     final midpoint.
// Bisection keeps the root bracketed for either crossing orientation.
// Throws ProtocolViolation on non-finite function values.
double defensive_choose(const SkepticFunction& s_fn, const RootSolverConfig& cfg);

// Kernel-weighted residual sum S(p) = sum_i K((p, x_now), (p_i, x_i)) (y_i - p_i).
// Empty history gives the zero function.
SkepticFunction k29_score(const History& history, const Eigen::VectorXd& x_now,
                          const KernelSpec& kernel);

// Root of the score function via defensive_choose, except that a score that
// is flat zero across the whole grid (notably round 1) yields the neutral
// forecast 0.5 rather than the leftmost grid point.
double k29_forecast(const History& history, const Eigen::VectorXd& x_now,
                    const K29Config& cfg);

// Rule of succession: (k + 1) / (n + 1) at round n, k = number of 1s so far.
double laplace_forecast(const History& history);

// Categorical forecast from the sign of the running bias sum:
// 1 if sum(y_i - p_i) > 0, 0 if < 0, 0.5 on an exact tie.
double sign_limit_forecast(const History& history);

// --- Game-strategy adapters ------------------------------------------------

std::unique_ptr<ForecasterStrategy> make_constant_forecaster(double p0);
std::unique_ptr<ForecasterStrategy> make_laplace_forecaster();
std::unique_ptr<ForecasterStrategy> make_sign_limit_forecaster();
// Defends against the designated skeptic's announced function.
std::unique_ptr<ForecasterStrategy> make_defensive_forecaster(RootSolverConfig cfg);
std::unique_ptr<ForecasterStrategy> make_k29_forecaster(K29Config cfg);

}  // namespace k29
