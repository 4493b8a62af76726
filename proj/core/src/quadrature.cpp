#include "ccmfbm/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "ccmfbm/errors.hpp"

namespace ccmfbm {

GaussLegendre::GaussLegendre(int n) : nodes_(n), weights_(n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
  // Newton iteration on P_n from the Tricomi initial guesses; roots are symmetric.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged root for the weight
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes_[n / 2] = 0.0;
}

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(n);
  return *slot;
}

namespace {

void append_regular(double lo, double hi, const GaussLegendre& rule, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (int i = 0; i < rule.size(); ++i) {
    nodes.push_back(mid + half * rule.nodes()[i]);
    weights.push_back(half * rule.weights()[i]);
  }
}

void append_half(double end, double h, int dir, Endpoint e, const GaussLegendre& rule,
                 std::vector<double>& nodes, std::vector<double>& weights) {
  if (e.regular()) {
    if (dir > 0) {
      append_regular(end, end + h, rule, nodes, weights);
    } else {
      append_regular(end - h, end, rule, nodes, weights);
    }
    return;
  }
  const double p = 1.0 / (1.0 + e.exponent);
  auto panel = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (int i = 0; i < rule.size(); ++i) {
      const double y = mid + half * rule.nodes()[i];
      const double yp = std::pow(y, p);
      nodes.push_back(end + dir * h * yp);
      weights.push_back(half * rule.weights()[i] * p * h * yp / y);
    }
  };
  double hi = 1.0;
  for (int level = 0; level < e.levels; ++level) {
    const double lo = hi * detail::kGradingRatio;
    panel(lo, hi);
    hi = lo;
  }
  panel(0.0, hi);
}

}  // namespace

void append_singular_nodes(double lo, double hi, Endpoint left, Endpoint right,
                           const GaussLegendre& rule, std::vector<double>& nodes,
                           std::vector<double>& weights) {
  if (!(hi > lo)) return;
  if (left.regular() && right.regular()) {
    append_regular(lo, hi, rule, nodes, weights);
  } else if (left.regular()) {
    append_half(hi, hi - lo, -1, right, rule, nodes, weights);
  } else if (right.regular()) {
    append_half(lo, hi - lo, +1, left, rule, nodes, weights);
  } else {
    const double h = 0.5 * (hi - lo);
    append_half(lo, h, +1, left, rule, nodes, weights);
    append_half(hi, h, -1, right, rule, nodes, weights);
  }
}

}  // namespace ccmfbm
