#include "k29/skeptic.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace k29 {

void EpsilonParam::validate() const {
  const double a = std::abs(value);
  if (!std::isfinite(value) || a <= 0.0 || a > 0.5)
    throw std::invalid_argument("EpsilonParam: |eps| must be in (0, 0.5]");
}

void TestFunction::validate() const {
  if (!(center >= 0.0 && center <= 1.0))
    throw std::invalid_argument("TestFunction: center must be in [0, 1]");
  if (!(width > 0.0) || !std::isfinite(width))
    throw std::invalid_argument("TestFunction: width must be positive");
  if (object_profile && (!(object_profile->width > 0.0) ||
                         !std::isfinite(object_profile->width)))
    throw std::invalid_argument("TestFunction: object width must be positive");
}

double eval_test_function(const TestFunction& tf, double p, const Eigen::VectorXd* x) {
  const double dp = p - tf.center;
  double v = std::exp(-dp * dp / (2.0 * tf.width * tf.width));
  if (tf.object_profile) {
    if (x == nullptr)
      throw std::invalid_argument(
          "eval_test_function: object required by the object profile");
    const auto& prof = *tf.object_profile;
    if (x->size() != prof.reference.size())
      throw std::invalid_argument("eval_test_function: object dimension mismatch");
    v *= std::exp(-(*x - prof.reference).squaredNorm() /
                  (2.0 * prof.width * prof.width));
  }
  return v;
}

double slln_capital(const History& history, double eps) {
  // All factors are >= 1 - |eps| >= 0.5, so the log-domain sum is safe and
  // keeps very long products stable.
  double log_capital = 0.0;
  for (const Round& r : history)
    log_capital += std::log1p(eps * (r.label - r.forecast));
  return std::exp(log_capital);
}

double slln_stake(const History& history, EpsilonParam eps) {
  eps.validate();
  return eps.value * slln_capital(history, eps.value);
}

SkepticFunction two_sided_fn(const History& history, double eps) {
  EpsilonParam{eps}.validate();
  if (eps < 0.0)
    throw std::invalid_argument("two_sided_fn: eps must be positive");
  const double value =
      eps * (slln_capital(history, eps) - slln_capital(history, -eps));
  return SkepticFunction{[value](double) { return value; }, true};
}

double test_fn_capital(const History& history, double eps, const TestFunction& tf) {
  double log_capital = 0.0;
  for (const Round& r : history) {
    const double weight = eval_test_function(tf, r.forecast, &r.object);
    log_capital += std::log1p(eps * weight * (r.label - r.forecast));
  }
  return std::exp(log_capital);
}

SkepticFunction test_fn_strategy(const History& history, const Eigen::VectorXd& x_now,
                                 EpsilonParam eps, const TestFunction& tf) {
  eps.validate();
  tf.validate();
  const double scale = eps.value * test_fn_capital(history, eps.value, tf);
  return SkepticFunction{
      [scale, tf, x = x_now](double p) { return scale * eval_test_function(tf, p, &x); },
      true};
}

void MixtureSpec::validate() const {
  if (components.size() != weights.size())
    throw std::invalid_argument("MixtureSpec: components/weights size mismatch");
  if (components.empty())
    throw std::invalid_argument("MixtureSpec: empty mixture");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("MixtureSpec: weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("MixtureSpec: weights must sum to 1");
}

SkepticFunction mixture_fn(const MixtureSpec& mix, const History& history,
                           const Eigen::VectorXd& x_now) {
  mix.validate();
  std::vector<SkepticFunction> parts;
  parts.reserve(mix.components.size());
  bool continuous = true;
  for (const auto& rule : mix.components) {
    parts.push_back(rule(history, x_now));
    continuous = continuous && parts.back().declared_continuous;
  }
  return SkepticFunction{
      [parts = std::move(parts), weights = mix.weights](double p) {
        double s = 0.0;
        for (std::size_t i = 0; i < parts.size(); ++i) s += weights[i] * parts[i](p);
        return s;
      },
      continuous};
}

MixtureSpec calibration_mixture_grid(int num_centers, double width, double eps,
                                     int eps_levels) {
  if (num_centers < 1)
    throw std::invalid_argument("calibration_mixture_grid: need at least one center");
  if (eps_levels < 1)
    throw std::invalid_argument("calibration_mixture_grid: need at least one level");
  MixtureSpec mix;
  for (int level = 0; level < eps_levels; ++level) {
    const double e = eps / static_cast<double>(1 << level);
    EpsilonParam{e}.validate();
    for (double sign : {1.0, -1.0}) {
      for (int j = 0; j < num_centers; ++j) {
        const double center =
            num_centers == 1 ? 0.5 : static_cast<double>(j) / (num_centers - 1);
        TestFunction tf{center, width, std::nullopt};
        mix.components.push_back(
            [e, sign, tf](const History& h, const Eigen::VectorXd& x) {
              return test_fn_strategy(h, x, EpsilonParam{sign * e}, tf);
            });
      }
    }
  }
  mix.weights.assign(mix.components.size(),
                     1.0 / static_cast<double>(mix.components.size()));
  return mix;
}

// --- adapters ---------------------------------------------------------------

namespace {

class SllnSkeptic final : public SkepticStrategy {
 public:
  explicit SllnSkeptic(double eps) : eps_{eps} { eps_.validate(); }
  std::string name() const override { return "slln"; }
  StakeRestriction restriction() const override {
    return StakeRestriction::nonnegative_capital;
  }
  SkepticFunction announce(const History& history, const Eigen::VectorXd&) override {
    const double stake = slln_stake(history, eps_);
    return SkepticFunction{[stake](double) { return stake; }, true};
  }

 private:
  EpsilonParam eps_;
};

class TwoSidedSkeptic final : public SkepticStrategy {
 public:
  explicit TwoSidedSkeptic(double eps) : eps_(eps) { EpsilonParam{eps}.validate(); }
  std::string name() const override { return "twosided"; }
  SkepticFunction announce(const History& history, const Eigen::VectorXd&) override {
    return two_sided_fn(history, eps_);
  }

 private:
  double eps_;
};

class TestFnSkeptic final : public SkepticStrategy {
 public:
  TestFnSkeptic(double eps, TestFunction tf) : eps_{eps}, tf_(std::move(tf)) {
    eps_.validate();
    tf_.validate();
  }
  std::string name() const override { return "testfn"; }
  SkepticFunction announce(const History& history,
                           const Eigen::VectorXd& object) override {
    return test_fn_strategy(history, object, eps_, tf_);
  }

 private:
  EpsilonParam eps_;
  TestFunction tf_;
};

class MixtureSkeptic final : public SkepticStrategy {
 public:
  explicit MixtureSkeptic(MixtureSpec mix) : mix_(std::move(mix)) { mix_.validate(); }
  std::string name() const override { return "mixture"; }
  SkepticFunction announce(const History& history,
                           const Eigen::VectorXd& object) override {
    return mixture_fn(mix_, history, object);
  }

 private:
  MixtureSpec mix_;
};

class ZeroSkeptic final : public SkepticStrategy {
 public:
  std::string name() const override { return "zero"; }
  StakeRestriction restriction() const override {
    return StakeRestriction::nonnegative_capital;
  }
  SkepticFunction announce(const History&, const Eigen::VectorXd&) override {
    return SkepticFunction{[](double) { return 0.0; }, true};
  }
};

}  // namespace

std::unique_ptr<SkepticStrategy> make_slln_skeptic(double eps) {
  return std::make_unique<SllnSkeptic>(eps);
}
std::unique_ptr<SkepticStrategy> make_two_sided_skeptic(double eps) {
  return std::make_unique<TwoSidedSkeptic>(eps);
}
std::unique_ptr<SkepticStrategy> make_test_fn_skeptic(double eps, TestFunction tf) {
  return std::make_unique<TestFnSkeptic>(eps, std::move(tf));
}
std::unique_ptr<SkepticStrategy> make_mixture_skeptic(MixtureSpec mix) {
  return std::make_unique<MixtureSkeptic>(std::move(mix));
}
std::unique_ptr<SkepticStrategy> make_zero_skeptic() {
  return std::make_unique<ZeroSkeptic>();
}

}  // namespace k29
