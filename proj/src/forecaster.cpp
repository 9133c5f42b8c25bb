#include "k29/forecaster.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace k29 {

void RootSolverConfig::validate() const {
  if (grid_points < 2)
    throw std::invalid_argument("RootSolverConfig: need at least 2 grid points");
  if (bisection_iters < 1)
    throw std::invalid_argument("RootSolverConfig: need at least 1 bisection step");
  if (!(root_tolerance > 0.0) || !std::isfinite(root_tolerance))
    throw std::invalid_argument("RootSolverConfig: tolerance must be positive");
}

namespace {

struct GridScan {
  std::vector<double> points;
  std::vector<double> values;
  bool all_positive = true;
  bool all_negative = true;
  double max_abs = 0.0;
};

GridScan scan_grid(const SkepticFunction& s_fn, const RootSolverConfig& cfg) {
  const int m = cfg.grid_points;
  GridScan g;
  g.points.resize(m);
  g.values.resize(m);
  for (int k = 0; k < m; ++k) {
    const double p = static_cast<double>(k) / (m - 1);
    const double v = s_fn(p);
    if (!std::isfinite(v))
      throw ProtocolViolation("defensive root search: non-finite skeptic value at p=" +
                              std::to_string(p));
    g.points[k] = p;
    g.values[k] = v;
    g.all_positive = g.all_positive && v > 0.0;
    g.all_negative = g.all_negative && v < 0.0;
    g.max_abs = std::max(g.max_abs, std::abs(v));
  }
  return g;
}

// Bisects a bracket with strictly opposite end signs. The halving rule
// "value > 0 removes the left half" matches a positive-to-negative crossing;
// the opposite orientation mirrors it so the root stays bracketed.
double bisect(const SkepticFunction& s_fn, double a, double b, bool left_positive,
              int iters) {
  for (int it = 0; it < iters; ++it) {
    const double mid = 0.5 * (a + b);
    const double v = s_fn(mid);
    if (!std::isfinite(v))
      throw ProtocolViolation("defensive root search: non-finite skeptic value at p=" +
                              std::to_string(mid));
    if (left_positive ? v > 0.0 : v < 0.0)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

double choose_from_scan(const SkepticFunction& s_fn, const GridScan& g,
                        const RootSolverConfig& cfg) {
  if (g.all_positive) return 1.0;
  if (g.all_negative) return 0.0;
  for (std::size_t k = 0; k < g.values.size(); ++k)
    if (std::abs(g.values[k]) <= cfg.root_tolerance) return g.points[k];
  for (std::size_t k = 0; k + 1 < g.values.size(); ++k) {
    const double va = g.values[k];
    const double vb = g.values[k + 1];
    if ((va > 0.0 && vb < 0.0) || (va < 0.0 && vb > 0.0))
      return bisect(s_fn, g.points[k], g.points[k + 1], va > 0.0,
                    cfg.bisection_iters);
  }
  // Unreachable: mixed signs with no value inside tolerance imply an
  // adjacent strict sign change.
  throw std::logic_error("defensive root search: no bracket found");
}

}  // namespace

double defensive_choose(const SkepticFunction& s_fn, const RootSolverConfig& cfg) {
  cfg.validate();
  return choose_from_scan(s_fn, scan_grid(s_fn, cfg), cfg);
}

SkepticFunction k29_score(const History& history, const Eigen::VectorXd& x_now,
                          const KernelSpec& kernel) {
  kernel.validate();
  const auto n = static_cast<Eigen::Index>(history.size());
  if (n == 0) return SkepticFunction{[](double) { return 0.0; }, true};

  Eigen::ArrayXd ps(n);
  Eigen::ArrayXd residuals(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ps[i] = history[i].forecast;
    residuals[i] = history[i].label - history[i].forecast;
  }

  // S(p) = offset + sum_i coeff_i K_p(p, p_i); the object factors do not
  // depend on p, so they fold into the coefficients (product) or into a
  // constant term (sum).
  Eigen::ArrayXd coeff = residuals;
  double offset = 0.0;
  if (kernel.object_kernel == ObjectKernelKind::gaussian) {
    Eigen::MatrixXd objects(x_now.size(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (history[i].object.size() != x_now.size())
        throw std::invalid_argument("k29_score: object dimension mismatch");
      objects.col(i) = history[i].object;
    }
    const Eigen::ArrayXd kx = object_kernel_row(x_now, objects, kernel.gamma);
    if (kernel.combine == KernelCombine::product)
      coeff = kx * residuals;
    else
      offset = (kx * residuals).sum();
  } else if (kernel.combine == KernelCombine::sum) {
    offset = 0.0;  // absent object kernel contributes 0 in sum mode
  }

  const double sigma = kernel.sigma;
  return SkepticFunction{
      [ps = std::move(ps), coeff = std::move(coeff), offset, sigma](double p) {
        return offset + (forecast_kernel_row(p, ps, sigma) * coeff).sum();
      },
      true};
}

double k29_forecast(const History& history, const Eigen::VectorXd& x_now,
                    const K29Config& cfg) {
  cfg.solver.validate();
  const SkepticFunction score = k29_score(history, x_now, cfg.kernel);
  const GridScan g = scan_grid(score, cfg.solver);
  if (g.max_abs <= cfg.solver.root_tolerance) return 0.5;  // flat zero: neutral
  return choose_from_scan(score, g, cfg.solver);
}

double laplace_forecast(const History& history) {
  std::size_t ones = 0;
  for (const Round& r : history) ones += r.label;
  return (static_cast<double>(ones) + 1.0) / (static_cast<double>(history.size()) + 2.0);
}

double sign_limit_forecast(const History& history) {
  double sum = 0.0;
  for (const Round& r : history) sum += r.label - r.forecast;
  if (sum > 0.0) return 1.0;
  if (sum < 0.0) return 0.0;
  return 0.5;
}

// --- adapters ---------------------------------------------------------------

namespace {

class ConstantForecaster final : public ForecasterStrategy {
 public:
  explicit ConstantForecaster(double p0) : p0_(p0) {
    if (!is_valid_forecast(p0))
      throw std::invalid_argument("constant forecaster: p0 must be in [0, 1]");
  }
  std::string name() const override { return "constant"; }
  double choose(const History&, const Eigen::VectorXd&,
                const SkepticFunction*) override {
    return p0_;
  }

 private:
  double p0_;
};

class LaplaceForecaster final : public ForecasterStrategy {
 public:
  std::string name() const override { return "laplace"; }
  double choose(const History& history, const Eigen::VectorXd&,
                const SkepticFunction*) override {
    return laplace_forecast(history);
  }
};

class SignLimitForecaster final : public ForecasterStrategy {
 public:
  std::string name() const override { return "signlimit"; }
  double choose(const History& history, const Eigen::VectorXd&,
                const SkepticFunction*) override {
    return sign_limit_forecast(history);
  }
};

class DefensiveForecaster final : public ForecasterStrategy {
 public:
  explicit DefensiveForecaster(RootSolverConfig cfg) : cfg_(cfg) { cfg_.validate(); }
  std::string name() const override { return "defensive"; }
  double choose(const History&, const Eigen::VectorXd&,
                const SkepticFunction* announced) override {
    if (announced == nullptr)
      throw std::invalid_argument(
          "defensive forecaster requires a designated skeptic");
    return defensive_choose(*announced, cfg_);
  }

 private:
  RootSolverConfig cfg_;
};

class K29Forecaster final : public ForecasterStrategy {
 public:
  explicit K29Forecaster(K29Config cfg) : cfg_(cfg) {
    cfg_.kernel.validate();
    cfg_.solver.validate();
  }
  std::string name() const override { return "k29"; }
  double choose(const History& history, const Eigen::VectorXd& object,
                const SkepticFunction*) override {
    return k29_forecast(history, object, cfg_);
  }

 private:
  K29Config cfg_;
};

}  // namespace

std::unique_ptr<ForecasterStrategy> make_constant_forecaster(double p0) {
  return std::make_unique<ConstantForecaster>(p0);
}
std::unique_ptr<ForecasterStrategy> make_laplace_forecaster() {
  return std::make_unique<LaplaceForecaster>();
}
std::unique_ptr<ForecasterStrategy> make_sign_limit_forecaster() {
  return std::make_unique<SignLimitForecaster>();
}
std::unique_ptr<ForecasterStrategy> make_defensive_forecaster(RootSolverConfig cfg) {
  return std::make_unique<DefensiveForecaster>(cfg);
}
std::unique_ptr<ForecasterStrategy> make_k29_forecaster(K29Config cfg) {
  return std::make_unique<K29Forecaster>(cfg);
}

}  // namespace k29
