#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ccmfbm/grid.hpp"
#include "ccmfbm/kernels.hpp"
#include "ccmfbm/params.hpp"
#include "ccmfbm/simulation.hpp"

namespace ccmfbm {

struct DriftHypothesis {
  double theta = 0.0;
};

/// Kernel ell and drift g of an equivalent-law Gaussian process
/// W~_t = W_t - int_0^t [int_0^s ell(s,u) dW_u + g(s)] ds.
///
/// ell follows the point-sample convention of resolvent_kernel: ell(k,j) belongs to
/// (t_k, t_j). g.values[i-1] is the drift on cell i.
struct EquivalenceSpec {
  TriangularKernel ell;
  SampledFunction g;

  void validate() const;
};

/// Terminal value w_T = int_0^T L^-1(T,s) dx_s for many paths on one grid. Only the last row
/// of the inverse operator is built.
class DriftEstimator {
 public:
  DriftEstimator(const ModelParams& p, const TimeGrid& grid, const SeriesSpec& series = {},
                 const QuadratureSpec& q = {});

  double terminal_bm(const SamplePath& path) const;
  /// theta w_T - theta^2 T / 2.
  double log_likelihood(const SamplePath& path, const DriftHypothesis& hyp) const;
  /// w_T / T.
  double mle(const SamplePath& path) const;

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& weights() const { return row_; }

 private:
  TimeGrid grid_;
  std::vector<double> row_;
};

double drift_log_likelihood(const SamplePath& path, const DriftHypothesis& hyp,
                            const ModelParams& p, const SeriesSpec& series = {},
                            const QuadratureSpec& q = {});

double drift_mle(const SamplePath& path, const ModelParams& p, const SeriesSpec& series = {},
                 const QuadratureSpec& q = {});

/// Left-point sums of
///   int_0^t [Y_s + g(s)] dW_s - 1/2 int_0^t [Y_s - g(s)]^2 ds,  Y_s = int_0^s ell(s,u) dW_u,
/// over the whole grid. Y on cell i uses row t_{i-1} of ell and increments dW_1..dW_{i-1}.
/// Reads the path's w component, or x when w is absent.
double girsanov_log_likelihood(const SamplePath& w_path, const EquivalenceSpec& spec);

/// Integral of L^-1(t, s) over s in (0, t]. Equals t exactly when the observation-drift and
/// driving-noise drift models coincide.
double inverse_kernel_mass(const ModelParams& p, double t, const SeriesSpec& series = {},
                           const QuadratureSpec& q = {});

struct PredictionResult {
  double u = 0.0;
  std::vector<double> targets;
  std::vector<double> mean;
  Eigen::MatrixXd cov;
};

/// Conditional law of X at target times in [u, T] given the path on [0, u]; u must be a grid node.
///
/// mean_t = X_u + sum_j Psi_j dX_j with Psi = (L*)^-1 [L(t,.) - L(u,.)] on the subgrid [0,u],
/// cov(t,s) = R(t,s) - a^2 u - a b (J(u,t) + J(u,s)) - b^2 int_0^u K_H(t,v) K_H(s,v) dv.
/// The covariance is computed once in the constructor and does not depend on any path.
class Predictor {
 public:
  Predictor(const ModelParams& p, const TimeGrid& grid, double u, std::vector<double> targets,
            const SeriesSpec& series = {}, const QuadratureSpec& q = {});

  PredictionResult predict(const SamplePath& path) const;

  /// Weights on the observed samples X(t_1..t_u): mean = weights.row(i) . X.
  Eigen::MatrixXd sample_weights() const;
  const Eigen::MatrixXd& psi() const { return psi_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  int observed_steps() const { return u_index_; }
  const TimeGrid& grid() const { return grid_; }

 private:
  TimeGrid grid_;
  double u_;
  int u_index_;
  std::vector<double> targets_;
  Eigen::MatrixXd psi_;  // one row per target, u_index_ columns
  Eigen::MatrixXd cov_;
};

PredictionResult predict(const SamplePath& path, const ModelParams& p, double u,
                         const std::vector<double>& targets, const SeriesSpec& series = {},
                         const QuadratureSpec& q = {});

}  // namespace ccmfbm
