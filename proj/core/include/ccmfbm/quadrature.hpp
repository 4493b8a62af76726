#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace ccmfbm {

/// Gauss-Legendre nodes and weights on [-1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(int n);

  int size() const { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  template <class F>
  double integrate(F&& f, double lo, double hi) const {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(mid + half * nodes_[i]);
    return sum * half;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Cached rule of order n; the reference stays valid for the program lifetime.
const GaussLegendre& gauss_legendre(int n);

/// Local behaviour of an integrand at one end of the interval: f(x) ~ |x - end|^exponent
/// times a factor with further fractional powers. `graded` requests the geometric panel
/// refinement even when the exponent is zero (a kink like |x - end|^alpha * smooth).
struct Endpoint {
  double exponent = 0.0;
  bool graded = false;
  /// Number of geometric panels toward the endpoint after the substitution.
  int levels = 4;

  bool regular() const { return exponent == 0.0 && !graded; }
};

inline constexpr Endpoint kRegular{};

namespace detail {

inline constexpr double kGradingRatio = 0.15;

// Integral over [end, end + dir*h] after the substitution x = end + dir*h*y^p, p = 1/(1+e),
// which turns |x - end|^e dx into a bounded density in y. The y-range is cut into
// geometrically shrinking panels toward y = 0 to absorb the remaining fractional powers.
template <class F>
double endpoint_half(F& f, double end, double h, int dir, Endpoint e, const GaussLegendre& rule) {
  if (e.regular()) {
    return dir > 0 ? rule.integrate(f, end, end + h) : rule.integrate(f, end - h, end);
  }
  const double p = 1.0 / (1.0 + e.exponent);
  auto g = [&](double y) {
    const double yp = std::pow(y, p);
    return f(end + dir * h * yp) * p * h * yp / y;
  };
  double sum = 0.0;
  double hi = 1.0;
  for (int level = 0; level < e.levels; ++level) {
    const double lo = hi * kGradingRatio;
    sum += rule.integrate(g, lo, hi);
    hi = lo;
  }
  sum += rule.integrate(g, 0.0, hi);
  return sum;
}

}  // namespace detail

/// Integral of f over [lo, hi] with algebraic endpoint behaviour removed by substitution.
/// Exponents must exceed -1. Nodes never touch the endpoints themselves.
template <class F>
double integrate_singular(F&& f, double lo, double hi, Endpoint left, Endpoint right,
                          const GaussLegendre& rule) {
  if (!(hi > lo)) return 0.0;
  if (left.regular() && right.regular()) return rule.integrate(f, lo, hi);
  if (left.regular()) {
    // One singular end: no need to split.
    return detail::endpoint_half(f, hi, hi - lo, -1, right, rule);
  }
  if (right.regular()) return detail::endpoint_half(f, lo, hi - lo, +1, left, rule);
  const double h = 0.5 * (hi - lo);
  return detail::endpoint_half(f, lo, h, +1, left, rule) +
         detail::endpoint_half(f, hi, h, -1, right, rule);
}

/// Appends the nodes and weights that integrate_singular would use on [lo, hi].
void append_singular_nodes(double lo, double hi, Endpoint left, Endpoint right,
                           const GaussLegendre& rule, std::vector<double>& nodes,
                           std::vector<double>& weights);

}  // namespace ccmfbm
