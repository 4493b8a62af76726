#include "ccmfbm/verify/oracles.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ccmfbm/covariance.hpp"
#include "ccmfbm/errors.hpp"
#include "ccmfbm/parallel.hpp"

namespace ccmfbm::verify {

double oracle_mg_kernel(double hurst, double t, double s) {
  require_long_range_hurst(hurst);
  if (s >= t) return 0.0;
  const double alpha = hurst - 0.5;
  boost::math::quadrature::tanh_sinh<double> integrator;
  // Integrate in x = u - s so the singular end sits at 0, where tanh-sinh keeps full
  // relative precision in the argument.
  auto f = [&](double x) { return std::pow(s + x, alpha) * std::pow(x, alpha - 1.0); };
  const double inner = integrator.integrate(f, 0.0, t - s);
  return c_of_h(hurst) * std::pow(s, -alpha) * inner;
}

double inverse_equation_lhs(const InverseKernel& inverse, double t, double s) {
  const ModelParams& p = inverse.params();
  const double direct = p.a() * inverse(t, s);
  if (s >= t || p.b() == 0.0) return direct;
  const double alpha = p.alpha();
  const double c = c_of_h(p.hurst());
  // dK_H/du(u,s) du = c (u/s)^alpha (u-s)^(alpha-1) du = c (u/s)^alpha dv / alpha.
  auto f = [&](double v) {
    const double u = std::min(t, s + std::pow(v, 1.0 / alpha));
    if (!(u < t)) return 0.0;
    return inverse(t, u) * c * std::pow(u / s, alpha) / alpha;
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double integral = integrator.integrate(f, 0.0, std::pow(t - s, alpha));
  return direct + p.b() * integral;
}

GaussianConditioning schur_conditioning(const ModelParams& p, const TimeGrid& grid, int u_index,
                                        const std::vector<double>& targets) {
  if (u_index < 1 || u_index > grid.steps()) throw DomainError("u index out of range");
  const int n = u_index;
  const int m = static_cast<int>(targets.size());
  Eigen::MatrixXd obs(n, n);
  parallel_for(0, n, [&](int k) {
    for (int j = 0; j <= k; ++j) obs(k, j) = ccmfbm_cov(p, grid.node(k + 1), grid.node(j + 1));
  });
  obs.triangularView<Eigen::StrictlyUpper>() = obs.transpose();
  Eigen::MatrixXd cross(m, n);
  Eigen::MatrixXd prior(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) cross(i, j) = ccmfbm_cov(p, targets[i], grid.node(j + 1));
    for (int k = 0; k <= i; ++k) prior(i, k) = prior(k, i) = ccmfbm_cov(p, targets[i], targets[k]);
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(obs);
  if (ldlt.info() != Eigen::Success) throw NumericalError("observed covariance is not factorisable");
  const Eigen::MatrixXd weights = ldlt.solve(cross.transpose()).transpose();
  Eigen::MatrixXd cov = prior - weights * cross.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {weights, cov, obs};
}

Eigen::MatrixXd constant_kernel_resolvent(double c, const TimeGrid& grid) {
  const int n = grid.steps();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k <= n; ++k)
    for (int j = 1; j <= k; ++j) r(k - 1, j - 1) = c * std::exp(c * (grid.node(k) - grid.node(j)));
  return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  // Q_KS(lambda) = 2 sum_k (-1)^(k-1) exp(-2 k^2 lambda^2)
  double q = 0.0;
  if (lambda < 0.2) {
    q = 1.0;
  } else {
    for (int k = 1; k <= 100; ++k) {
      const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
      q += term;
      if (std::abs(term) < 1e-12) break;
    }
  }
  return {d, std::clamp(q, 0.0, 1.0)};
}

double sample_cov_standard_error(double s_kk, double s_jj, double s_kj, int n) {
  return std::sqrt((s_kk * s_jj + s_kj * s_kj) / n);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs matching samples");
  double mx = 0.0;
  double my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace ccmfbm::verify
