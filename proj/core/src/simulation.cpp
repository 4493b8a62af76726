#include "ccmfbm/simulation.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "ccmfbm/covariance.hpp"
#include "ccmfbm/errors.hpp"
#include "ccmfbm/kernels.hpp"
#include "ccmfbm/operators.hpp"
#include "ccmfbm/parallel.hpp"
#include "ccmfbm/rng.hpp"

namespace ccmfbm {
namespace {

std::vector<double> draw_normals(std::uint64_t seed, int path, int count) {
  auto engine = path_engine(seed, static_cast<std::uint64_t>(path));
  std::normal_distribution<double> normal;
  std::vector<double> xi(count);
  for (double& v : xi) v = normal(engine);
  return xi;
}

// Increments dW_j = sqrt(dt) xi_j + drift * dt.
Eigen::VectorXd brownian_increments(const std::vector<double>& xi, double dt, double drift) {
  const double scale = std::sqrt(dt);
  Eigen::VectorXd dw(xi.size());
  for (std::size_t j = 0; j < xi.size(); ++j) dw[j] = scale * xi[j] + drift * dt;
  return dw;
}

std::vector<double> with_origin(const Eigen::VectorXd& values) {
  std::vector<double> out(values.size() + 1, 0.0);
  for (Eigen::Index k = 0; k < values.size(); ++k) out[k + 1] = values[k];
  return out;
}

Eigen::VectorXd running_sum(const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = acc += v[k];
  return out;
}

// x = a w + b bh, plus theta t for the observation drift model.
SamplePath assemble(const SimConfig& cfg, const Eigen::VectorXd& w, const Eigen::VectorXd* bh,
                    std::vector<double> xi) {
  const auto& p = cfg.params;
  const int n = cfg.grid.steps();
  Eigen::VectorXd x = p.a() * w;
  if (bh) x += p.b() * *bh;
  if (cfg.drift_model == DriftModel::observation) {
    for (int k = 0; k < n; ++k) x[k] += cfg.theta * cfg.grid.node(k + 1);
  }
  SamplePath path{cfg.grid, with_origin(x), with_origin(w), std::nullopt, std::move(xi)};
  if (bh) path.bh = with_origin(*bh);
  return path;
}

void require_scheme(const SimConfig& cfg, Scheme scheme) {
  cfg.validate();
  if (cfg.scheme != scheme) {
    throw DomainError("configuration selects scheme '" + std::string(scheme_name(cfg.scheme)) +
                      "' but '" + std::string(scheme_name(scheme)) + "' was called");
  }
}

double driving_drift(const SimConfig& cfg) {
  return cfg.drift_model == DriftModel::driving_noise ? cfg.theta : 0.0;
}

}  // namespace

std::vector<double> SamplePath::increments() const {
  std::vector<double> dx(x.size() - 1);
  for (std::size_t k = 1; k < x.size(); ++k) dx[k - 1] = x[k] - x[k - 1];
  return dx;
}

Scheme parse_scheme(std::string_view name) {
  if (name == "cholesky") return Scheme::cholesky;
  if (name == "mg_approx" || name == "mg-approx") return Scheme::mg_approx;
  if (name == "series") return Scheme::series;
  throw DomainError("unknown scheme '" + std::string(name) + "'");
}

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::cholesky:
      return "cholesky";
    case Scheme::mg_approx:
      return "mg_approx";
    case Scheme::series:
      return "series";
  }
  return "unknown";
}

void SimConfig::validate() const {
  if (n_paths < 1) throw DomainError("n_paths must be positive");
  if (scheme == Scheme::series && series_terms < 1) {
    throw DomainError("series_terms must be positive");
  }
  if (!std::isfinite(theta)) throw DomainError("theta must be finite");
  if (drift_model == DriftModel::driving_noise && scheme != Scheme::mg_approx) {
    throw DomainError("the driving-noise drift model needs the mg_approx scheme");
  }
  quad.validate();
}

std::vector<SamplePath> simulate(const SimConfig& cfg) {
  switch (cfg.scheme) {
    case Scheme::cholesky:
      return simulate_cholesky(cfg);
    case Scheme::mg_approx:
      return simulate_mg_approx(cfg);
    case Scheme::series:
      return simulate_series(cfg);
  }
  throw DomainError("unknown scheme");
}

Eigen::MatrixXd fbm_cholesky_factor(double hurst, const TimeGrid& grid) {
  const int n = grid.steps();
  Eigen::MatrixXd r(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j <= k; ++j) r(k, j) = r(j, k) = fbm_cov(hurst, grid.node(k + 1), grid.node(j + 1));
  const Eigen::VectorXd diag = r.diagonal();
  for (double eps : {0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10}) {
    Eigen::MatrixXd jittered = r;
    jittered.diagonal() += eps * diag;
    Eigen::LLT<Eigen::MatrixXd> llt(jittered);
    if (llt.info() == Eigen::Success) {
      if (eps > 0.0) {
        warn("fBm covariance needed jitter " + format_number(eps) + " * diag for H = " +
             format_number(hurst) + ", N = " + std::to_string(n));
      }
      return llt.matrixL();
    }
  }
  throw NumericalError("Cholesky factorisation of the fBm covariance failed for H = " +
                       format_number(hurst) + " on N = " + std::to_string(n) + ", T = " +
                       format_number(grid.horizon()) + " even with 1e-10 jitter");
}

std::vector<SamplePath> simulate_cholesky(const SimConfig& cfg) {
  require_scheme(cfg, Scheme::cholesky);
  const int n = cfg.grid.steps();
  const bool mixed = cfg.params.b() != 0.0;
  const Eigen::MatrixXd factor = mixed ? fbm_cholesky_factor(cfg.params.hurst(), cfg.grid)
                                       : Eigen::MatrixXd();
  std::vector<SamplePath> paths(cfg.n_paths, SamplePath{cfg.grid, {}, {}, {}, {}});
  parallel_for(0, cfg.n_paths, [&](int i) {
    std::vector<double> xi = draw_normals(cfg.seed, i, n);
    const Eigen::VectorXd w = running_sum(brownian_increments(xi, cfg.grid.step(), 0.0));
    if (mixed) {
      const Eigen::Map<const Eigen::VectorXd> noise(xi.data(), n);
      const Eigen::VectorXd bh = factor.triangularView<Eigen::Lower>() * noise;
      paths[i] = assemble(cfg, w, &bh, std::move(xi));
    } else {
      paths[i] = assemble(cfg, w, nullptr, std::move(xi));
    }
  });
  return paths;
}

std::vector<SamplePath> simulate_mg_approx(const SimConfig& cfg) {
  require_scheme(cfg, Scheme::mg_approx);
  const int n = cfg.grid.steps();
  const bool mixed = cfg.params.b() != 0.0;
  const Eigen::MatrixXd kbar =
      mixed ? kernel_cell_averages(cfg.params.hurst(), cfg.grid, cfg.quad).matrix()
            : Eigen::MatrixXd();
  const double drift = driving_drift(cfg);
  std::vector<SamplePath> paths(cfg.n_paths, SamplePath{cfg.grid, {}, {}, {}, {}});
  parallel_for(0, cfg.n_paths, [&](int i) {
    std::vector<double> xi = draw_normals(cfg.seed, i, n);
    const Eigen::VectorXd dw = brownian_increments(xi, cfg.grid.step(), drift);
    const Eigen::VectorXd w = running_sum(dw);
    if (mixed) {
      const Eigen::VectorXd bh = kbar.triangularView<Eigen::Lower>() * dw;
      paths[i] = assemble(cfg, w, &bh, std::move(xi));
    } else {
      paths[i] = assemble(cfg, w, nullptr, std::move(xi));
    }
  });
  return paths;
}

namespace {

struct SeriesParts {
  Eigen::MatrixXd brownian;    // int_0^{t_i} e~_k(s) ds
  Eigen::MatrixXd fractional;  // int_0^{t_i} K_H(t_i, s) e~_k(s) ds
};

// Fills out[k] = e~_{k+1}(s) for the trigonometric basis, using rotation for cos/sin(m w s).
void trig_values(double s, double horizon, int terms, std::vector<double>& out) {
  const double amp = std::sqrt(2.0 / horizon);
  out[0] = 1.0 / std::sqrt(horizon);
  const std::complex<double> step = std::polar(1.0, 2.0 * std::numbers::pi * s / horizon);
  std::complex<double> rot = step;
  for (int k = 1; k < terms; k += 2) {
    out[k] = amp * rot.real();
    if (k + 1 < terms) out[k + 1] = amp * rot.imag();
    rot *= step;
  }
}

SeriesParts series_parts(const ModelParams& p, const TimeGrid& grid, int terms,
                         const QuadratureSpec& q) {
  const int n = grid.steps();
  const double horizon = grid.horizon();
  SeriesParts parts{Eigen::MatrixXd::Zero(n, terms), Eigen::MatrixXd::Zero(n, terms)};
  const double amp = std::sqrt(2.0 / horizon);
  for (int i = 1; i <= n; ++i) {
    const double t = grid.node(i);
    parts.brownian(i - 1, 0) = t / std::sqrt(horizon);
    for (int k = 1; k < terms; k += 2) {
      const int m = (k + 1) / 2;
      const double omega = 2.0 * std::numbers::pi * m / horizon;
      parts.brownian(i - 1, k) = amp * std::sin(omega * t) / omega;
      if (k + 1 < terms) parts.brownian(i - 1, k + 1) = amp * (1.0 - std::cos(omega * t)) / omega;
    }
  }
  if (p.b() == 0.0) return parts;
  const double alpha = p.alpha();
  const double c = c_of_h(p.hurst());
  const auto& inner = gauss_legendre(q.node_count);
  const CellRule cells(grid, alpha);
  const double dt = grid.step();
  parallel_for(1, n + 1, [&](int i) {
    const double t = grid.node(i);
    std::vector<double> basis(terms);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(terms);
    for (int j = 1; j <= i; ++j) {
      const auto nodes = cells.nodes(i, j);
      const auto weights = cells.weights(i, j);
      for (std::size_t r = 0; r < nodes.size(); ++r) {
        const double kval = detail::mg_kernel_raw(alpha, c, t, nodes[r], inner);
        trig_values(nodes[r], horizon, terms, basis);
        const double wk = weights[r] * dt * kval;
        for (int k = 0; k < terms; ++k) acc[k] += wk * basis[k];
      }
    }
    parts.fractional.row(i - 1) = acc.transpose();
  });
  return parts;
}

}  // namespace

Eigen::MatrixXd series_functions(const ModelParams& p, const TimeGrid& grid, int terms,
                                 Basis basis, const QuadratureSpec& q) {
  if (terms < 1) throw DomainError("series needs at least one term");
  if (basis != Basis::trigonometric) throw DomainError("unsupported basis");
  const SeriesParts parts = series_parts(p, grid, terms, q);
  return p.a() * parts.brownian + p.b() * parts.fractional;
}

std::vector<SamplePath> simulate_series(const SimConfig& cfg, Basis basis) {
  require_scheme(cfg, Scheme::series);
  if (basis != Basis::trigonometric) throw DomainError("unsupported basis");
  const int terms = cfg.series_terms;
  const SeriesParts parts = series_parts(cfg.params, cfg.grid, terms, cfg.quad);
  const bool mixed = cfg.params.b() != 0.0;
  std::vector<SamplePath> paths(cfg.n_paths, SamplePath{cfg.grid, {}, {}, {}, {}});
  parallel_for(0, cfg.n_paths, [&](int i) {
    std::vector<double> xi = draw_normals(cfg.seed, i, terms);
    const Eigen::Map<const Eigen::VectorXd> noise(xi.data(), terms);
    const Eigen::VectorXd w = parts.brownian * noise;
    if (mixed) {
      const Eigen::VectorXd bh = parts.fractional * noise;
      paths[i] = assemble(cfg, w, &bh, std::move(xi));
    } else {
      paths[i] = assemble(cfg, w, nullptr, std::move(xi));
    }
  });
  return paths;
}

SamplePath recover_bm(const SamplePath& path, const TriangularKernel& inverse) {
  if (!(path.grid == inverse.grid())) throw DomainError("path and inverse operator grids differ");
  if (static_cast<int>(path.x.size()) != path.grid.steps() + 1) {
    throw DomainError("path must hold N+1 samples");
  }
  const std::vector<double> dx = path.increments();
  const Eigen::Map<const Eigen::VectorXd> dxv(dx.data(), dx.size());
  const Eigen::VectorXd w = inverse.matrix().triangularView<Eigen::Lower>() * dxv;
  return SamplePath{path.grid, path.x, with_origin(w), std::nullopt, path.xi};
}

SamplePath recover_bm(const SamplePath& path, const ModelParams& p, const SeriesSpec& series,
                      const QuadratureSpec& q) {
  return recover_bm(path, build_inverse_operator(p, path.grid, series, q));
}

std::vector<double> quadratic_variation(const SamplePath& path) {
  std::vector<double> qv(path.x.size(), 0.0);
  for (std::size_t k = 1; k < path.x.size(); ++k) {
    const double d = path.x[k] - path.x[k - 1];
    qv[k] = qv[k - 1] + d * d;
  }
  return qv;
}

std::vector<HolderRow> holder_diagnostic(const ModelParams& p, const std::vector<double>& lags,
                                         double t, const QuadratureSpec& q) {
  if (!(t >= 0.0)) throw DomainError("holder_diagnostic requires t >= 0");
  if (p.a() == 0.0) throw DomainError("holder_diagnostic normalises by a^2 and needs a != 0");
  std::vector<HolderRow> rows;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const double delta = lags[i];
    if (!(delta > 0.0)) throw DomainError("lags must be positive");
    if (i > 0 && !(delta < lags[i - 1])) throw DomainError("lags must be strictly decreasing");
    const double second_moment =
        ccmfbm_cov(p, t + delta, t + delta, q) - 2.0 * ccmfbm_cov(p, t + delta, t, q) +
        ccmfbm_cov(p, t, t, q);
    rows.push_back({delta, second_moment / (p.a() * p.a() * delta)});
  }
  return rows;
}

}  // namespace ccmfbm
