#pragma once

namespace ccmfbm {

/// Mixture X = a W + b B^H with B^H built from W through the Molchan-Golosov kernel.
///
/// The public constructor enforces a*b != 0 and 1/2 < H < 1. `unchecked` exists for the
/// degenerate oracles (pure Bm with b = 0, pure fBm with a = 0) and still requires
/// H in [1/2, 1).
class ModelParams {
 public:
  ModelParams(double a, double b, double hurst);

  static ModelParams unchecked(double a, double b, double hurst);

  double a() const { return a_; }
  double b() const { return b_; }
  double hurst() const { return hurst_; }
  /// H - 1/2, the exponent that appears throughout the kernels.
  double alpha() const { return hurst_ - 0.5; }

 private:
  struct NoCheck {};
  ModelParams(double a, double b, double hurst, NoCheck);

  double a_;
  double b_;
  double hurst_;
};

struct QuadratureSpec {
  /// Gauss-Legendre order used on each panel after singularity removal.
  int node_count = 24;
  /// Absolute tolerance for the adaptive oracle quadrature.
  double abs_tol = 1e-12;

  void validate() const;
};

/// Truncation control for the inverse-kernel series sum over k.
struct SeriesSpec {
  double tol = 1e-10;
  int max_terms = 60;

  void validate() const;
};

/// Throws DomainError unless 1/2 < H < 1.
void require_long_range_hurst(double hurst);

}  // namespace ccmfbm
