#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ccmfbm/grid.hpp"
#include "ccmfbm/kernels.hpp"
#include "ccmfbm/params.hpp"

/// Independent reference computations. Each takes a different numerical route from the
/// library function it checks (adaptive tanh-sinh instead of fixed Gauss rules, dense Gaussian
/// conditioning instead of operator formulas, closed forms where they exist).
namespace ccmfbm::verify {

/// K_H(t,s) by tanh-sinh quadrature of c s^-alpha int_s^t u^alpha (u-s)^(alpha-1) du.
double oracle_mg_kernel(double hurst, double t, double s);

/// a L^-1(t,s) + b int_s^t L^-1(t,u) dK_H/du(u,s) du, which should equal 1_[0,t)(s).
/// The outer integral is taken by tanh-sinh after u = s + v^(1/alpha).
double inverse_equation_lhs(const InverseKernel& inverse, double t, double s);

/// Finite-dimensional Gaussian conditioning of X at `targets` on X(t_1..t_u) with the full
/// covariance table from ccmfbm_cov.
struct GaussianConditioning {
  /// One row per target: E[X_t | X_obs] = weights.row(i) . X_obs.
  Eigen::MatrixXd weights;
  Eigen::MatrixXd cov;
  /// Covariance of the observed samples (for weight-space error norms).
  Eigen::MatrixXd observed_cov;
};
GaussianConditioning schur_conditioning(const ModelParams& p, const TimeGrid& grid, int u_index,
                                        const std::vector<double>& targets);

/// Closed-form resolvent of ell(t,s) = c: c exp(c (t-s)), point-sampled like sample_kernel.
Eigen::MatrixXd constant_kernel_resolvent(double c, const TimeGrid& grid);

struct KsResult {
  double statistic;
  double p_value;
};
/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic Kolmogorov p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Standard error of the sample covariance of a centred Gaussian pair with covariances
/// s_kk, s_jj, s_kj from n draws: sqrt((s_kk s_jj + s_kj^2) / n).
double sample_cov_standard_error(double s_kk, double s_jj, double s_kj, int n);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ccmfbm::verify
