#include "ccmfbm/inference.hpp"

#include <cmath>
#include <string>

#include "ccmfbm/covariance.hpp"
#include "ccmfbm/errors.hpp"
#include "ccmfbm/operators.hpp"

namespace ccmfbm {
namespace {

void require_full_path(const SamplePath& path, const TimeGrid& grid) {
  if (!(path.grid == grid)) throw DomainError("path grid differs from the estimator grid");
  if (static_cast<int>(path.x.size()) != grid.steps() + 1) {
    throw DomainError("path must hold N+1 samples");
  }
}

}  // namespace

void EquivalenceSpec::validate() const {
  if (!(ell.grid() == g.grid)) throw DomainError("ell and g live on different grids");
  if (!ell.is_lower_triangular()) throw DomainError("ell must be lower triangular (Volterra)");
}

DriftEstimator::DriftEstimator(const ModelParams& p, const TimeGrid& grid,
                               const SeriesSpec& series, const QuadratureSpec& q)
    : grid_(grid),
      row_(inverse_operator_row(InverseKernel(p, series, q), grid, grid.steps())) {}

double DriftEstimator::terminal_bm(const SamplePath& path) const {
  require_full_path(path, grid_);
  double w = 0.0;
  for (int j = 1; j <= grid_.steps(); ++j) w += row_[j - 1] * (path.x[j] - path.x[j - 1]);
  return w;
}

double DriftEstimator::log_likelihood(const SamplePath& path, const DriftHypothesis& hyp) const {
  const double theta = hyp.theta;
  if (!std::isfinite(theta)) throw DomainError("theta must be finite");
  return theta * terminal_bm(path) - 0.5 * theta * theta * grid_.horizon();
}

double DriftEstimator::mle(const SamplePath& path) const {
  return terminal_bm(path) / grid_.horizon();
}

double drift_log_likelihood(const SamplePath& path, const DriftHypothesis& hyp,
                            const ModelParams& p, const SeriesSpec& series,
                            const QuadratureSpec& q) {
  return DriftEstimator(p, path.grid, series, q).log_likelihood(path, hyp);
}

double drift_mle(const SamplePath& path, const ModelParams& p, const SeriesSpec& series,
                 const QuadratureSpec& q) {
  return DriftEstimator(p, path.grid, series, q).mle(path);
}

double girsanov_log_likelihood(const SamplePath& w_path, const EquivalenceSpec& spec) {
  spec.validate();
  const TimeGrid& grid = w_path.grid;
  if (!(grid == spec.g.grid)) throw DomainError("path grid differs from the equivalence spec");
  const std::vector<double>& w = w_path.w ? *w_path.w : w_path.x;
  if (static_cast<int>(w.size()) != grid.steps() + 1) throw DomainError("path must hold N+1 samples");
  const int n = grid.steps();
  const double dt = grid.step();
  const auto& ell = spec.ell.matrix();
  std::vector<double> dw(n);
  for (int i = 0; i < n; ++i) dw[i] = w[i + 1] - w[i];
  double ito = 0.0;
  double quadratic = 0.0;
  for (int i = 1; i <= n; ++i) {
    double y = 0.0;
    for (int j = 1; j < i; ++j) y += ell(i - 2, j - 1) * dw[j - 1];
    const double g = spec.g.values[i - 1];
    ito += (y + g) * dw[i - 1];
    quadratic += (y - g) * (y - g) * dt;
  }
  return ito - 0.5 * quadratic;
}

double inverse_kernel_mass(const ModelParams& p, double t, const SeriesSpec& series,
                           const QuadratureSpec& q) {
  if (!(t > 0.0)) throw DomainError("inverse_kernel_mass requires t > 0");
  const InverseKernel inverse(p, series, q);
  if (p.b() == 0.0) return t / p.a();
  const double alpha = p.alpha();
  const auto& rule = gauss_legendre(q.node_count);
  const double part = integrate_singular([&](double s) { return inverse.series_part(t, s); }, 0.0,
                                         t, Endpoint{-alpha, true}, Endpoint{alpha, true}, rule);
  return (t + part) / p.a();
}

Predictor::Predictor(const ModelParams& p, const TimeGrid& grid, double u,
                     std::vector<double> targets, const SeriesSpec& series,
                     const QuadratureSpec& q)
    : grid_(grid), u_(u), u_index_(grid.index_of(u)), targets_(std::move(targets)) {
  if (u_index_ < 2) {
    throw DomainError("observation horizon u = " + format_number(u) +
                      " must be a grid node with at least two steps before it");
  }
  if (targets_.empty()) throw DomainError("prediction needs at least one target");
  const double uu = grid.node(u_index_);
  for (double t : targets_) {
    if (!(t >= uu - 1e-12 && t <= grid.horizon() + 1e-12)) {
      throw DomainError("target t = " + format_number(t) + " lies outside [u, T]");
    }
  }
  const int m = static_cast<int>(targets_.size());
  const int nu = u_index_;
  const TimeGrid sub = grid.prefix(nu);

  psi_ = Eigen::MatrixXd::Zero(m, nu);
  if (p.b() != 0.0) {
    const double alpha = p.alpha();
    const double c = c_of_h(p.hurst());
    const auto& inner = gauss_legendre(q.node_count);
    const CellRule cells(grid, alpha);
    // Cells 1..u lie left of every target, so only the target at u itself needs the diagonal rule.
    auto kbar = [&](double t, int j) {
      const int row = t > uu ? nu + 1 : nu;
      return cells.average(row, j, [&](double s) { return detail::mg_kernel_raw(alpha, c, t, s, inner); });
    };
    std::vector<double> at_u(nu);
    for (int j = 1; j <= nu; ++j) at_u[j - 1] = kbar(uu, j);
    const TriangularKernel inverse = build_inverse_operator(p, sub, series, q);
    for (int i = 0; i < m; ++i) {
      std::vector<double> f(nu);
      for (int j = 1; j <= nu; ++j) f[j - 1] = p.b() * (kbar(targets_[i], j) - at_u[j - 1]);
      const SampledFunction psi = apply_lstar_inverse(inverse, SampledFunction(sub, std::move(f)));
      for (int j = 0; j < nu; ++j) psi_(i, j) = psi.values[j];
    }
  }

  const double a = p.a();
  const double b = p.b();
  cov_ = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k <= i; ++k) {
      const double t = targets_[i];
      const double s = targets_[k];
      double explained = a * a * uu;
      if (b != 0.0) {
        const double h = p.hurst();
        if (a != 0.0) {
          explained += a * b * (mg_kernel_integral(h, uu, t, q) + mg_kernel_integral(h, uu, s, q));
        }
        explained += b * b * mg_kernel_product_integral(h, t, s, uu, q);
      }
      cov_(i, k) = cov_(k, i) = ccmfbm_cov(p, t, s, q) - explained;
    }
  }
}

PredictionResult Predictor::predict(const SamplePath& path) const {
  require_full_path(path, grid_);
  const int nu = u_index_;
  Eigen::VectorXd dx(nu);
  for (int j = 1; j <= nu; ++j) dx[j - 1] = path.x[j] - path.x[j - 1];
  const Eigen::VectorXd shift = psi_ * dx;
  PredictionResult result{u_, targets_, std::vector<double>(targets_.size()), cov_};
  for (std::size_t i = 0; i < targets_.size(); ++i) result.mean[i] = path.x[nu] + shift[i];
  return result;
}

Eigen::MatrixXd Predictor::sample_weights() const {
  Eigen::MatrixXd weights = difference_cols(psi_);
  weights.col(u_index_ - 1).array() += 1.0;
  return weights;
}

PredictionResult predict(const SamplePath& path, const ModelParams& p, double u,
                         const std::vector<double>& targets, const SeriesSpec& series,
                         const QuadratureSpec& q) {
  return Predictor(p, path.grid, u, targets, series, q).predict(path);
}

}  // namespace ccmfbm
