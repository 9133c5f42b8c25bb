#pragma once

#include <Eigen/Dense>

#include "k29/types.hpp"

namespace k29 {

enum class ObjectKernelKind { none, gaussian };
enum class KernelCombine { product, sum };

// Forecast-continuous Mercer kernel on ([0,1] x X)^2: a Gaussian factor in
// the forecast coordinate, optionally combined with a Gaussian factor in the
// object coordinate by tensor product or direct sum. Both factors use the
// exp(-d^2 / (4 w^2)) parameterization so one formula serves both.
struct KernelSpec {
  double sigma = 0.01;  // forecast bandwidth, > 0
  ObjectKernelKind object_kernel = ObjectKernelKind::none;
  double gamma = 1.0;  // object bandwidth, > 0 when object kernel present
  KernelCombine combine = KernelCombine::product;

  void validate() const;
};

// exp(-(p-q)^2 / (4 sigma^2)); symmetric, in (0, 1].
double gaussian_forecast_kernel(double p, double q, double sigma);

// exp(-|a-b|^2 / (4 gamma^2)); throws on dimension mismatch.
double gaussian_object_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              double gamma);

// Kernel between (p_a, x_a) and (p_b, x_b) under spec. With no object
// kernel the object factor is 1 (product) or 0 (sum), so the value reduces
// to the forecast kernel either way.
double joint_kernel(double p_a, const Eigen::VectorXd& x_a, double p_b,
                    const Eigen::VectorXd& x_b, const KernelSpec& spec);

// Vectorized rows for score-function sums.
Eigen::ArrayXd forecast_kernel_row(double p, const Eigen::ArrayXd& ps, double sigma);

// Object factors K_x(x, cols(i)) for every column of X (d x n).
Eigen::ArrayXd object_kernel_row(const Eigen::VectorXd& x, const Eigen::MatrixXd& X,
                                 double gamma);

}  // namespace k29
