#include "k29/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace k29 {

void KernelSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("KernelSpec: sigma must be positive");
  if (object_kernel == ObjectKernelKind::gaussian &&
      (!(gamma > 0.0) || !std::isfinite(gamma)))
    throw std::invalid_argument("KernelSpec: gamma must be positive");
}

double gaussian_forecast_kernel(double p, double q, double sigma) {
  const double d = p - q;
  return std::exp(-d * d / (4.0 * sigma * sigma));
}

double gaussian_object_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              double gamma) {
  if (a.size() != b.size())
    throw std::invalid_argument("gaussian_object_kernel: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  return std::exp(-(a - b).squaredNorm() / (4.0 * gamma * gamma));
}

double joint_kernel(double p_a, const Eigen::VectorXd& x_a, double p_b,
                    const Eigen::VectorXd& x_b, const KernelSpec& spec) {
  const double kp = gaussian_forecast_kernel(p_a, p_b, spec.sigma);
  double kx;
  if (spec.object_kernel == ObjectKernelKind::none) {
    kx = spec.combine == KernelCombine::product ? 1.0 : 0.0;
  } else {
    kx = gaussian_object_kernel(x_a, x_b, spec.gamma);
  }
  return spec.combine == KernelCombine::product ? kp * kx : kp + kx;
}

Eigen::ArrayXd forecast_kernel_row(double p, const Eigen::ArrayXd& ps, double sigma) {
  return (-(ps - p).square() / (4.0 * sigma * sigma)).exp();
}

Eigen::ArrayXd object_kernel_row(const Eigen::VectorXd& x, const Eigen::MatrixXd& X,
                                 double gamma) {
  if (x.size() != X.rows())
    throw std::invalid_argument("object_kernel_row: dimension mismatch");
  Eigen::ArrayXd sq = (X.colwise() - x).colwise().squaredNorm().transpose().array();
  return (-sq / (4.0 * gamma * gamma)).exp();
}

}  // namespace k29
