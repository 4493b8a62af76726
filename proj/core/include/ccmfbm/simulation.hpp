#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ccmfbm/grid.hpp"
#include "ccmfbm/params.hpp"

namespace ccmfbm {

/// Values of a process at the grid nodes t_0..t_N.
struct SamplePath {
  TimeGrid grid;
  /// The mixture X, with x[0] = 0.
  std::vector<double> x;
  /// Driving Brownian motion W (including any drift fed into it).
  std::optional<std::vector<double>> w;
  /// Fractional component B^H.
  std::optional<std::vector<double>> bh;
  /// Standard normal draws that produced the path.
  std::optional<std::vector<double>> xi;

  /// x[k] - x[k-1] for k = 1..N.
  std::vector<double> increments() const;
};

enum class Scheme { cholesky, mg_approx, series };

Scheme parse_scheme(std::string_view name);
std::string_view scheme_name(Scheme scheme);

/// How a drift theta enters a simulated path.
enum class DriftModel {
  /// No drift.
  none,
  /// The driving noise carries it: increments dW + theta dt are pushed through the kernel.
  /// Available for mg_approx only.
  driving_noise,
  /// The observation carries it: X_t + theta t.
  observation,
};

struct SimConfig {
  ModelParams params;
  TimeGrid grid;
  int n_paths = 1;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::cholesky;
  /// Number of basis functions K for the series scheme.
  int series_terms = 64;
  DriftModel drift_model = DriftModel::none;
  double theta = 0.0;
  QuadratureSpec quad{};

  void validate() const;
};

/// Dispatches on cfg.scheme.
std::vector<SamplePath> simulate(const SimConfig& cfg);

/// Lower Cholesky factor of R_H(t_k, t_j), k,j = 1..N. Adds eps * diag with eps escalating
/// 1e-14 .. 1e-10 (and warns) if the plain factorisation fails.
Eigen::MatrixXd fbm_cholesky_factor(double hurst, const TimeGrid& grid);

/// X(t_k) = a sqrt(dt) sum_{j<=k} xi_j + b sum_{j<=k} L_H(k,j) xi_j.
std::vector<SamplePath> simulate_cholesky(const SimConfig& cfg);

/// X = M dW with M from build_forward_operator and dW = sqrt(dt) xi.
std::vector<SamplePath> simulate_mg_approx(const SimConfig& cfg);

/// Orthonormal families on [0, T] for the series scheme.
enum class Basis {
  /// 1/sqrt(T), sqrt(2/T) cos(2 pi m s/T), sqrt(2/T) sin(2 pi m s/T), m = 1, 2, ...
  trigonometric,
};

/// e_k(t_i) = int_0^{t_i} L(t_i, s) e~_k(s) ds for k = 1..terms, as an N x terms matrix
/// (row i-1 belongs to t_i).
Eigen::MatrixXd series_functions(const ModelParams& p, const TimeGrid& grid, int terms,
                                 Basis basis = Basis::trigonometric,
                                 const QuadratureSpec& q = {});

/// X(t) = sum_{k<=K} e_k(t) xi_k.
std::vector<SamplePath> simulate_series(const SimConfig& cfg, Basis basis = Basis::trigonometric);

/// W(t_k) = sum_{j<=k} Minv(k,j) dX_j with a prebuilt inverse operator on the path's grid.
SamplePath recover_bm(const SamplePath& path, const TriangularKernel& inverse);
/// Builds the inverse operator and recovers W.
SamplePath recover_bm(const SamplePath& path, const ModelParams& p, const SeriesSpec& series = {},
                      const QuadratureSpec& q = {});

/// Running sums of squared increments, one value per node (the first is 0).
std::vector<double> quadratic_variation(const SamplePath& path);

struct HolderRow {
  double delta;
  double ratio;
};

/// E[(X_{t+delta} - X_t)^2] / (a^2 delta) from ccmfbm_cov for each lag. Lags must be
/// positive and strictly decreasing.
std::vector<HolderRow> holder_diagnostic(const ModelParams& p, const std::vector<double>& lags,
                                         double t = 0.5, const QuadratureSpec& q = {});

}  // namespace ccmfbm
