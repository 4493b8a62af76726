#include "ccmfbm/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

#include "ccmfbm/errors.hpp"
#include "ccmfbm/kernels.hpp"
#include "ccmfbm/quadrature.hpp"

namespace ccmfbm {

void IncrementQuery::validate() const {
  if (!(delta > 0.0)) throw DomainError("IncrementQuery: delta must be > 0");
  if (!(t0 >= 0.0)) throw DomainError("IncrementQuery: t0 must be >= 0");
  if (!(t >= t0)) throw DomainError("IncrementQuery: t must be >= t0");
}

double fbm_cov(double hurst, double t, double s) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("fbm_cov requires H in (0,1)");
  if (t < 0.0 || s < 0.0) throw DomainError("fbm_cov requires t, s >= 0");
  const double two_h = 2.0 * hurst;
  return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(std::abs(t - s), two_h));
}

double mg_kernel_integral(double hurst, double m, double s, const QuadratureSpec& q) {
  require_long_range_hurst(hurst);
  if (m < 0.0 || s < 0.0) throw DomainError("mg_kernel_integral requires m, s >= 0");
  if (m > s) m = s;  // K_H(s,u) vanishes beyond u = s
  if (m == 0.0) return 0.0;
  const double alpha = hurst - 0.5;
  const double beta = std::numbers::pi / std::sin(std::numbers::pi * alpha);
  double sum = std::pow(m, 1.0 + alpha) / (1.0 + alpha);
  if (s > m) {
    const auto& rule = gauss_legendre(q.node_count);
    auto f = [&](double v) {
      return std::pow(v, alpha) * boost::math::ibeta(1.0 - alpha, alpha, std::min(1.0, m / v));
    };
    // 1 - I_x(1-alpha, alpha) ~ (1-x)^alpha: a kink at v = m, smooth further out.
    double hi = std::min(s, 2.0 * m);
    double tail = integrate_singular(f, m, hi, Endpoint{0.0, true}, kRegular, rule);
    double lo = hi;
    while (lo < s) {
      hi = std::min(s, 2.0 * lo);
      tail += rule.integrate(f, lo, hi);
      lo = hi;
    }
    sum += tail;
  }
  return c_of_h(hurst) * beta * sum;
}

double cross_cov(double hurst, double t, double s, const QuadratureSpec& q) {
  if (t <= 0.0 || s <= 0.0) return 0.0;
  return mg_kernel_integral(hurst, std::min(t, s), s, q);
}

double mg_kernel_product_integral(double hurst, double t, double s, double m,
                                  const QuadratureSpec& q) {
  require_long_range_hurst(hurst);
  const double lower_time = std::min(t, s);
  if (m < 0.0 || m > lower_time * (1.0 + 1e-15)) {
    throw DomainError("mg_kernel_product_integral requires 0 <= m <= min(t,s)");
  }
  if (m == 0.0) return 0.0;
  m = std::min(m, lower_time);
  const double alpha = hurst - 0.5;
  const double c = c_of_h(hurst);
  const auto& rule = gauss_legendre(q.node_count);
  auto f = [&](double u) {
    return detail::mg_kernel_raw(alpha, c, t, u, rule) * detail::mg_kernel_raw(alpha, c, s, u, rule);
  };
  // Near u = 0 both kernels blow up like u^-alpha; at u = m a kernel whose time equals m
  // vanishes like (m-u)^alpha.
  Endpoint right = kRegular;
  if (m == lower_time) {
    const double exponent = (t == s) ? 2.0 * alpha : alpha;
    right = Endpoint{exponent, true};
  }
  return integrate_singular(f, 0.0, m, Endpoint{-2.0 * alpha, true}, right, rule);
}

double ccmfbm_cov(const ModelParams& p, double t, double s, const QuadratureSpec& q) {
  if (t < 0.0 || s < 0.0) throw DomainError("ccmfbm_cov requires t, s >= 0");
  const double m = std::min(t, s);
  double cov = p.a() * p.a() * m;
  if (p.a() != 0.0 && p.b() != 0.0 && m > 0.0) {
    cov += p.a() * p.b() *
           (mg_kernel_integral(p.hurst(), m, t, q) + mg_kernel_integral(p.hurst(), m, s, q));
  }
  if (p.b() != 0.0) cov += p.b() * p.b() * fbm_cov(p.hurst(), t, s);
  return cov;
}

double incremental_cov(const ModelParams& p, const IncrementQuery& iq, const QuadratureSpec& q) {
  iq.validate();
  const double t0d = iq.t0 + iq.delta;
  const double td = iq.t + iq.delta;
  return ccmfbm_cov(p, t0d, td, q) - ccmfbm_cov(p, t0d, iq.t, q) - ccmfbm_cov(p, iq.t0, td, q) +
         ccmfbm_cov(p, iq.t0, iq.t, q);
}

double lrd_asymptote(const ModelParams& p, const IncrementQuery& iq) {
  iq.validate();
  if (!(iq.t > iq.t0 + iq.delta)) throw DomainError("lrd_asymptote requires t > t0 + delta");
  if (!(iq.t0 > 0.0)) throw DomainError("lrd_asymptote requires t0 > 0");
  const double h = p.hurst();
  const double alpha = h - 0.5;
  const double d2 = iq.delta * iq.delta;
  const double lag = iq.t - iq.t0;
  const double fbm_term = p.b() * p.b() * h * (2.0 * h - 1.0) * d2 * std::pow(lag, 2.0 * h - 2.0);
  const double cross_term = p.a() * p.b() * d2 * c_of_h(h) * std::pow(iq.t / iq.t0, alpha) *
                            std::pow(lag, alpha - 1.0);
  return fbm_term + cross_term;
}

}  // namespace ccmfbm
