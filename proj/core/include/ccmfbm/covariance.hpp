#pragma once

#include "ccmfbm/params.hpp"

namespace ccmfbm {

/// Lagged-increment query for the incremental covariance
/// rho(t0, delta; t) = E[(X_{t0+delta} - X_{t0}) (X_{t+delta} - X_t)].
struct IncrementQuery {
  double t0 = 0.0;
  double delta = 0.0;
  double t = 0.0;

  void validate() const;
};

/// fBm covariance (t^2H + s^2H - |t-s|^2H) / 2. Any H in (0,1) is accepted.
double fbm_cov(double hurst, double t, double s);

/// E[W_t B^H_s] = int_0^{t^s} K_H(s,u) du.
double cross_cov(double hurst, double t, double s, const QuadratureSpec& q = {});

/// int_0^m K_H(s,u) du for 0 <= m <= s. Uses the order-swapped form
///   c(H) B(1-alpha, alpha) [ m^(1+alpha)/(1+alpha) + int_m^s v^alpha I_{m/v}(1-alpha, alpha) dv ]
/// where I is the regularised incomplete beta function.
double mg_kernel_integral(double hurst, double m, double s, const QuadratureSpec& q = {});

/// int_0^m K_H(t,u) K_H(s,u) du for 0 <= m <= min(t,s). With m = min(t,s) this is R_H(t,s).
double mg_kernel_product_integral(double hurst, double t, double s, double m,
                                  const QuadratureSpec& q = {});

/// Covariance of the mixture:
/// a^2 (t^s) + a b int_0^{t^s} [K_H(t,u) + K_H(s,u)] du + b^2 R_H(t,s).
double ccmfbm_cov(const ModelParams& p, double t, double s, const QuadratureSpec& q = {});

/// rho_X(t0, delta; t) from four evaluations of ccmfbm_cov.
double incremental_cov(const ModelParams& p, const IncrementQuery& iq, const QuadratureSpec& q = {});

/// Leading large-t behaviour of rho_X:
/// b^2 H(2H-1) delta^2 (t-t0)^(2H-2) + a b delta^2 c(H) (t/t0)^(H-1/2) (t-t0)^(H-3/2).
double lrd_asymptote(const ModelParams& p, const IncrementQuery& iq);

}  // namespace ccmfbm
