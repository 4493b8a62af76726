#include "ccmfbm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ccmfbm/errors.hpp"

namespace ccmfbm {
namespace {

constexpr double kLogSqrtTwoPi = 0.91893853320467274178;
// Largest tolerated term magnitude in the alternating series; beyond this the sum
// loses more than about eight significant digits.
constexpr double kMaxTermMagnitude = 1e8;

void require_positive_s(double s) {
  if (!(s > 0.0)) {
    throw DomainError("kernel evaluated at s = " + format_number(s) +
                      "; the factor s^-(H-1/2) requires s > 0");
  }
}

double c_formula(double hurst) {
  const double ratio = 2.0 * hurst * std::tgamma(1.5 - hurst) /
                       (std::tgamma(hurst + 0.5) * std::tgamma(2.0 - 2.0 * hurst));
  return std::sqrt(ratio) * (hurst - 0.5);
}

}  // namespace

double c_of_h(double hurst) {
  require_long_range_hurst(hurst);
  return c_formula(hurst);
}

double c_of_h_limit(double hurst) {
  if (!(hurst >= 0.5 && hurst < 1.0)) {
    throw DomainError("c(H) limit evaluation requires H in [1/2, 1)");
  }
  return c_formula(hurst);
}

double mg_kernel(double hurst, double t, double s, const QuadratureSpec& q) {
  require_long_range_hurst(hurst);
  require_positive_s(s);
  if (s >= t) return 0.0;
  const double alpha = hurst - 0.5;
  const auto& rule = gauss_legendre(q.node_count);
  const double inner =
      detail::mg_inner(alpha, s, std::pow(t - s, alpha), [](double) { return 1.0; }, rule);
  return c_formula(hurst) * std::pow(s, -alpha) * inner;
}

double mg_kernel_dt(double hurst, double t, double s) {
  require_long_range_hurst(hurst);
  require_positive_s(s);
  if (!(s < t)) throw DomainError("dK_H/dt(t,s) requires s < t");
  const double alpha = hurst - 0.5;
  return c_formula(hurst) * std::pow(t / s, alpha) * std::pow(t - s, alpha - 1.0);
}

double l_kernel(const ModelParams& p, double t, double s, const QuadratureSpec& q) {
  require_positive_s(s);
  if (s >= t) return 0.0;
  const double fbm_part = p.b() == 0.0 ? 0.0 : p.b() * mg_kernel(p.hurst(), t, s, q);
  return p.a() + fbm_part;
}

double gamma_k(double hurst, int k, double t, double s, const QuadratureSpec& q) {
  require_long_range_hurst(hurst);
  require_positive_s(s);
  if (k < 1) throw DomainError("gamma_k requires k >= 1");
  if (s >= t) return 0.0;
  const double alpha = hurst - 0.5;
  const double log_coef =
      k * std::log(c_formula(hurst) * std::tgamma(alpha)) - std::lgamma(k * alpha);
  const auto& rule = gauss_legendre(q.node_count);
  const double inner = detail::mg_inner(
      alpha, s, std::pow(t - s, alpha), [k](double w) { return std::pow(w, k - 1); }, rule);
  return std::exp(log_coef) * std::pow(s, -alpha) * inner;
}

double gamma_k_bound(double hurst, int k, double t, double s) {
  require_long_range_hurst(hurst);
  require_positive_s(s);
  if (k < 1) throw DomainError("gamma_k_bound requires k >= 1");
  if (s >= t) return 0.0;
  const double alpha = hurst - 0.5;
  const double ka = k * alpha;
  const double log_c = std::log(c_formula(hurst) * std::tgamma(alpha)) + alpha;
  const double log_bound = k * log_c - kLogSqrtTwoPi - (ka + 0.5) * std::log(ka) +
                           alpha * std::log(t / s) + ka * std::log(t - s);
  return std::exp(log_bound);
}

InverseKernel::InverseKernel(const ModelParams& p, const SeriesSpec& series,
                             const QuadratureSpec& q)
    : params_(p), series_(series), quad_(q), alpha_(p.alpha()) {
  series_.validate();
  quad_.validate();
  if (p.a() == 0.0) throw DomainError("the inverse kernel requires a != 0");
  if (p.b() == 0.0) return;  // pure Brownian case: no series terms
  if (!(alpha_ > 0.0)) throw DomainError("the inverse kernel series requires H > 1/2");

  const double ratio = p.b() / p.a();
  const double log_ratio = std::log(std::abs(ratio));
  const double term_sign = ratio > 0.0 ? -1.0 : 1.0;
  const double log_cg = std::log(c_formula(p.hurst()) * std::tgamma(alpha_));
  const double log_stirling_c = log_cg + alpha_;

  coef_.resize(series_.max_terms);
  log_bound_.resize(series_.max_terms + 1);
  double sign = 1.0;
  for (int k = 1; k <= series_.max_terms + 1; ++k) {
    const double ka = k * alpha_;
    sign *= term_sign;
    if (k <= series_.max_terms) {
      coef_[k - 1] = sign * std::exp(k * (log_ratio + log_cg) - std::lgamma(ka));
    }
    log_bound_[k - 1] =
        k * (log_ratio + log_stirling_c) - kLogSqrtTwoPi - (ka + 0.5) * std::log(ka);
  }
}

int InverseKernel::truncation_index(double t, double s) const {
  require_positive_s(s);
  if (coef_.empty() || s >= t) return 0;
  const double log_tol = std::log(series_.tol);
  const double lt = alpha_ * std::log(t / s);
  const double ld = alpha_ * std::log(t - s);
  double peak = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= series_.max_terms; ++k) {
    const double lb = log_bound_[k - 1] + k * ld;
    peak = std::max(peak, lb);
    if (peak > std::log(kMaxTermMagnitude)) {
      throw NumericalError("inverse-kernel series terms reach ~1e" +
                           std::to_string(static_cast<int>(peak / std::numbers::ln10)) +
                           "; the alternating sum cannot be evaluated in double precision "
                           "(reduce |b/a| or the horizon)");
    }
    const double next = log_bound_[k] + (k + 1) * ld;
    if (lb + lt < log_tol && next <= lb) return k;
  }
  throw TruncationError("inverse-kernel series did not reach tol " + format_number(series_.tol) +
                        " within " + std::to_string(series_.max_terms) + " terms at t = " +
                        format_number(t) + ", s = " + format_number(s));
}

double InverseKernel::series_part(double t, double s) const {
  const int terms = truncation_index(t, s);
  if (terms == 0) return 0.0;
  const auto& rule = gauss_legendre(quad_.node_count);
  const double* coef = coef_.data();
  auto horner = [coef, terms](double w) {
    double acc = coef[terms - 1];
    for (int k = terms - 2; k >= 0; --k) acc = acc * w + coef[k];
    return acc;
  };
  const double inner = detail::mg_inner(alpha_, s, std::pow(t - s, alpha_), horner, rule);
  return std::pow(s, -alpha_) * inner;
}

double InverseKernel::operator()(double t, double s) const {
  const double series = series_part(t, s);
  const double indicator = s < t ? 1.0 : 0.0;
  return (indicator + series) / params_.a();
}

double l_inverse_kernel(const ModelParams& p, double t, double s, const SeriesSpec& series,
                        const QuadratureSpec& q) {
  return InverseKernel(p, series, q)(t, s);
}

}  // namespace ccmfbm
