#pragma once

#include <vector>

#include "ccmfbm/params.hpp"
#include "ccmfbm/quadrature.hpp"

namespace ccmfbm {

/// Normalising constant of the Molchan-Golosov kernel,
/// sqrt(2H G(3/2-H) / (G(H+1/2) G(2-2H))) * (H - 1/2). Requires 1/2 < H < 1.
double c_of_h(double hurst);

/// Same formula, also accepting the limit H = 1/2 (where it vanishes).
double c_of_h_limit(double hurst);

/// Molchan-Golosov kernel K_H(t,s); zero for s >= t. Throws DomainError for s <= 0.
double mg_kernel(double hurst, double t, double s, const QuadratureSpec& q = {});

/// Closed form of the partial derivative of K_H in t: c(H) (t/s)^(H-1/2) (t-s)^(H-3/2).
double mg_kernel_dt(double hurst, double t, double s);

/// L(t,s) = a 1_[0,t)(s) + b K_H(t,s).
double l_kernel(const ModelParams& p, double t, double s, const QuadratureSpec& q = {});

/// k-th term of the inverse-kernel series,
/// c^k G(H-1/2)^k / G(k(H-1/2)) * s^-(H-1/2) * int_s^t u^(H-1/2) (u-s)^(k(H-1/2)-1) du.
double gamma_k(double hurst, int k, double t, double s, const QuadratureSpec& q = {});

/// Upper bound on gamma_k from the Stirling inequality G(x) >= sqrt(2 pi) x^(x-1/2) e^-x:
///
///   gamma_k(t,s) <= C^k / sqrt(2 pi) / (k alpha)^(k alpha + 1/2) * (t/s)^alpha * (t-s)^(k alpha)
///
/// with alpha = H - 1/2 and C = c(H) G(alpha) e^alpha. Does not include the |b/a|^k factor
/// that multiplies the term inside the series.
double gamma_k_bound(double hurst, int k, double t, double s);

/// Evaluator for the inverse kernel
///   L^-1(t,s) = (1/a) 1_[0,t)(s) + (1/a) sum_k (-1)^k (b/a)^k gamma_k(t,s).
///
/// All gamma_k share one quadrature: after w = (u-s)^alpha every term becomes
/// w^(k-1) times the same smooth weight, so the truncated series is summed
/// under the integral by Horner's rule.
class InverseKernel {
 public:
  explicit InverseKernel(const ModelParams& p, const SeriesSpec& series = {},
                         const QuadratureSpec& q = {});

  /// L^-1(t,s). Throws DomainError for s <= 0, TruncationError when the term bound
  /// does not fall below series.tol within series.max_terms, and NumericalError when
  /// the alternating series would lose more than ~8 digits to cancellation.
  double operator()(double t, double s) const;

  /// sum_k (-b/a)^k gamma_k(t,s), i.e. a L^-1(t,s) - 1_[0,t)(s).
  double series_part(double t, double s) const;

  /// Number of series terms used at (t,s).
  int truncation_index(double t, double s) const;

  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
  SeriesSpec series_;
  QuadratureSpec quad_;
  double alpha_;
  std::vector<double> coef_;       // (-b/a)^k c^k G(alpha)^k / G(k alpha), k = 1..max_terms
  std::vector<double> log_bound_;  // log of |b/a|^k * bound coefficient, without the (t,s) factors
};

/// Convenience wrapper constructing an InverseKernel for a single evaluation.
double l_inverse_kernel(const ModelParams& p, double t, double s, const SeriesSpec& series = {},
                        const QuadratureSpec& q = {});

namespace detail {

// (1/alpha) int_0^upper (s + w^(1/alpha))^alpha phi(w) dw, i.e. the Molchan-Golosov
// inner integral int_s^t u^alpha (u-s)^(alpha-1) phi((u-s)^alpha) du after w = (u-s)^alpha.
// Panels break at the knee w = s^alpha and then grow geometrically.
template <class Phi>
double mg_inner(double alpha, double s, double upper, Phi&& phi, const GaussLegendre& rule) {
  if (!(upper > 0.0)) return 0.0;
  const double inv = 1.0 / alpha;
  auto g = [&](double w) { return std::pow(s + std::pow(w, inv), alpha) * phi(w); };
  const double knee = std::pow(s, alpha);
  double sum = 0.0;
  if (knee >= upper) {
    sum = rule.integrate(g, 0.0, upper);
  } else {
    sum = rule.integrate(g, 0.0, knee);
    double lo = knee;
    while (lo < upper) {
      double hi = 4.0 * lo;
      if (hi > upper || upper - hi < 0.25 * (hi - lo)) hi = upper;
      sum += rule.integrate(g, lo, hi);
      lo = hi;
    }
  }
  return sum / alpha;
}

// K_H(t,s) without argument validation; alpha = H - 1/2 and c = c(H) precomputed.
inline double mg_kernel_raw(double alpha, double c, double t, double s, const GaussLegendre& rule) {
  if (s >= t) return 0.0;
  const double inner = mg_inner(alpha, s, std::pow(t - s, alpha), [](double) { return 1.0; }, rule);
  return c * std::pow(s, -alpha) * inner;
}

}  // namespace detail

}  // namespace ccmfbm
