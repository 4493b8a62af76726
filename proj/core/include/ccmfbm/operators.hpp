#pragma once

#include <span>
#include <vector>

#include "ccmfbm/grid.hpp"
#include "ccmfbm/kernels.hpp"
#include "ccmfbm/params.hpp"
#include "ccmfbm/quadrature.hpp"

namespace ccmfbm {

/// Averaging rules for the cells (t_{j-1}, t_j] of a grid, adapted to kernels that behave
/// like s^-alpha at s = 0 and like (t - s)^alpha at s = t (the Molchan-Golosov kernel and
/// every term of the inverse series do both).
///
/// Cell 1 is graded toward s = 0. The cell that ends at the row time (the diagonal) is graded
/// toward its right end. All other cells get a plain Gauss-Legendre rule. Weights sum to one
/// on every cell, so `average` returns a weighted mean.
class CellRule {
 public:
  /// Uniform averages (1/dt) int over the cell.
  CellRule(const TimeGrid& grid, double alpha);

  /// Averages against the profile that a constant Brownian increment on cell j gives to X
  /// inside that cell, rho_j(s) proportional to
  ///   a + b c(H) B(1-alpha, alpha) s^alpha I_{1 - t_{j-1}/s}(alpha, 1-alpha),
  /// the derivative of a (s - t_{j-1}) + b int_{t_{j-1}}^s K_H(s,u) du.
  static CellRule increment_profile(const ModelParams& p, const TimeGrid& grid);

  const TimeGrid& grid() const { return grid_; }

  /// Nodes of cell j (1-based) for a kernel row at time t_row, row >= j.
  std::span<const double> nodes(int row, int j) const { return pick(row, j).nodes; }
  std::span<const double> weights(int row, int j) const { return pick(row, j).weights; }

  template <class F>
  double average(int row, int j, F&& f) const {
    const Cell& c = pick(row, j);
    double sum = 0.0;
    for (std::size_t i = 0; i < c.nodes.size(); ++i) sum += c.weights[i] * f(c.nodes[i]);
    return sum;
  }

 private:
  struct Cell {
    std::vector<double> nodes;
    std::vector<double> weights;
  };
  explicit CellRule(const TimeGrid& grid) : grid_(grid) {}
  const Cell& pick(int row, int j) const { return row == j ? diagonal_[j - 1] : off_[j - 1]; }

  TimeGrid grid_;
  std::vector<Cell> off_;
  std::vector<Cell> diagonal_;
};

/// Kbar(k,j) = (1/dt) int over cell j of K_H(t_k, s) ds, the cell averages of the
/// Molchan-Golosov kernel.
TriangularKernel kernel_cell_averages(double hurst, const TimeGrid& grid,
                                      const QuadratureSpec& q = {});

/// Forward operator M(k,j) = a + (b/dt) int over cell j of K_H(t_k, s) ds.
///
/// M maps Brownian increments to path samples: X(t_k) = sum_{j<=k} M(k,j) dW_j,
/// with dW_j = sqrt(dt) xi_j.
TriangularKernel build_forward_operator(const ModelParams& p, const TimeGrid& grid,
                                        const QuadratureSpec& q = {});

/// Analytic inverse operator: Minv(k,j) averages L^-1(t_k, .) over cell j against the
/// increment profile of CellRule::increment_profile, so W(t_k) = sum_{j<=k} Minv(k,j) dX_j.
/// Throws what InverseKernel throws.
TriangularKernel build_inverse_operator(const ModelParams& p, const TimeGrid& grid,
                                        const SeriesSpec& series = {},
                                        const QuadratureSpec& q = {});

/// Row k (1-based) of build_inverse_operator without building the rest: k entries.
std::vector<double> inverse_operator_row(const InverseKernel& inverse, const TimeGrid& grid, int k);

/// Numeric inverse S M^-1 S of a forward operator (S = cumulative sum), in the same
/// increments-of-X to samples-of-W convention as build_inverse_operator.
TriangularKernel numeric_inverse_operator(const TriangularKernel& forward);

/// max |M (D Minv D) - I| with D the differencing matrix; zero when Minv inverts M exactly.
double identity_residual(const TriangularKernel& forward, const TriangularKernel& inverse);

/// Adjoint applied to a sampled function: (L* f)_j = sum_{k>=j} f_k (M(k,j) - M(k-1,j)).
/// For f = 1_[0,t_k) this returns row k of M, the cell averages of L(t_k, .).
SampledFunction apply_lstar(const TriangularKernel& forward, const SampledFunction& f);
SampledFunction apply_lstar(const ModelParams& p, const SampledFunction& f,
                            const QuadratureSpec& q = {});

/// Inverse adjoint as a Stieltjes sum against s -> L^-1(s, t_j):
///   f_j Minv(N,j) + sum_{k>j} (f_k - f_j) (Minv(k,j) - Minv(k-1,j)).
/// The jump 1/a of L^-1(., t) just after t is carried by Minv(j,j) itself.
SampledFunction apply_lstar_inverse(const TriangularKernel& inverse, const SampledFunction& f);
SampledFunction apply_lstar_inverse(const ModelParams& p, const SampledFunction& f,
                                    const SeriesSpec& series = {}, const QuadratureSpec& q = {});

/// Point samples ell(k,j) = f(t_k, t_j) for j <= k, with rows and columns at t_1..t_N.
/// f(t, t) should return the limit s -> t from below.
template <class F>
TriangularKernel sample_kernel(const TimeGrid& grid, F&& f) {
  const int n = grid.steps();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k <= n; ++k)
    for (int j = 1; j <= k; ++j) m(k - 1, j - 1) = f(grid.node(k), grid.node(j));
  return TriangularKernel(grid, std::move(m));
}

struct ResolventOptions {
  double tol = 1e-12;
  /// Iteration cap; 0 means N.
  int max_iterations = 0;
};

/// Resolvent sum_{m>=1} ell^(m) of a point-sampled Volterra kernel, with
/// ell^(m+1)(t,s) = int_s^t ell(t,u) ell^(m)(u,s) du by the trapezoid rule on the grid.
/// Stops when the max-abs norm of a term drops below tol or after the iteration cap.
/// Throws NumericalError if the term norm grew in every iteration up to the cap, and
/// warns if the cap is reached otherwise.
TriangularKernel resolvent_kernel(const TriangularKernel& ell, const TimeGrid& grid,
                                  const ResolventOptions& options = {});

/// D A: row k minus row k-1 (row 0 unchanged).
Eigen::MatrixXd difference_rows(const Eigen::MatrixXd& a);
/// A D: column j minus column j+1 (last column unchanged).
Eigen::MatrixXd difference_cols(const Eigen::MatrixXd& a);

}  // namespace ccmfbm
