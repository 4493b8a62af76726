#include "ccmfbm/operators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "ccmfbm/errors.hpp"
#include "ccmfbm/parallel.hpp"

namespace ccmfbm {

namespace {

constexpr int kInteriorNodes = 8;
constexpr int kSingularNodes = 12;

}  // namespace

CellRule::CellRule(const TimeGrid& grid, double alpha)
    : grid_(grid), off_(grid.steps()), diagonal_(grid.steps()) {
  const auto& interior = gauss_legendre(kInteriorNodes);
  const auto& singular = gauss_legendre(kSingularNodes);
  const bool kinked = alpha != 0.0;
  const Endpoint at_zero = kinked ? Endpoint{-alpha, true} : kRegular;
  const Endpoint at_row = kinked ? Endpoint{alpha, true} : kRegular;
  for (int j = 1; j <= grid.steps(); ++j) {
    const double lo = grid.node(j - 1);
    const double hi = grid.node(j);
    Cell& off = off_[j - 1];
    Cell& diag = diagonal_[j - 1];
    if (j == 1) {
      append_singular_nodes(lo, hi, at_zero, kRegular, singular, off.nodes, off.weights);
      append_singular_nodes(lo, hi, at_zero, at_row, singular, diag.nodes, diag.weights);
    } else {
      append_singular_nodes(lo, hi, kRegular, kRegular, interior, off.nodes, off.weights);
      append_singular_nodes(lo, hi, kRegular, at_row, singular, diag.nodes, diag.weights);
    }
    for (auto* cell : {&off, &diag})
      for (double& w : cell->weights) w /= grid.step();
  }
}

CellRule CellRule::increment_profile(const ModelParams& p, const TimeGrid& grid) {
  const double alpha = p.alpha();
  if (p.b() == 0.0 || alpha == 0.0) return CellRule(grid, alpha);
  CellRule rule(grid);
  rule.off_.resize(grid.steps());
  rule.diagonal_.resize(grid.steps());
  const auto& interior = gauss_legendre(kInteriorNodes);
  const auto& singular = gauss_legendre(kSingularNodes);
  const Endpoint at_zero{-alpha, true};
  const Endpoint at_row{alpha, true};
  // The profile has an additive (s - t_{j-1})^alpha kink at the left end of each cell.
  const Endpoint kink{0.0, true, 1};
  const double scale = p.b() * c_of_h(p.hurst()) * std::numbers::pi /
                       std::sin(std::numbers::pi * alpha);
  for (int j = 1; j <= grid.steps(); ++j) {
    const double lo = grid.node(j - 1);
    const double hi = grid.node(j);
    Cell& off = rule.off_[j - 1];
    Cell& diag = rule.diagonal_[j - 1];
    if (j == 1) {
      append_singular_nodes(lo, hi, at_zero, kRegular, singular, off.nodes, off.weights);
      append_singular_nodes(lo, hi, at_zero, at_row, singular, diag.nodes, diag.weights);
    } else {
      append_singular_nodes(lo, hi, kink, kRegular, interior, off.nodes, off.weights);
      append_singular_nodes(lo, hi, kink, at_row, singular, diag.nodes, diag.weights);
    }
    for (auto* cell : {&off, &diag}) {
      double total = 0.0;
      for (std::size_t i = 0; i < cell->nodes.size(); ++i) {
        const double s = cell->nodes[i];
        const double tail = boost::math::ibetac(1.0 - alpha, alpha, lo / s);
        cell->weights[i] *= p.a() + scale * std::pow(s, alpha) * tail;
        total += cell->weights[i];
      }
      for (double& w : cell->weights) w /= total;
    }
  }
  return rule;
}

TriangularKernel kernel_cell_averages(double hurst, const TimeGrid& grid, const QuadratureSpec& q) {
  require_long_range_hurst(hurst);
  q.validate();
  const double alpha = hurst - 0.5;
  const double c = c_of_h(hurst);
  const auto& inner = gauss_legendre(q.node_count);
  const CellRule cells(grid, alpha);
  const int n = grid.steps();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  parallel_for(1, n + 1, [&](int k) {
    const double t = grid.node(k);
    auto kernel = [&](double s) { return detail::mg_kernel_raw(alpha, c, t, s, inner); };
    for (int j = 1; j <= k; ++j) m(k - 1, j - 1) = cells.average(k, j, kernel);
  });
  return TriangularKernel(grid, std::move(m));
}

TriangularKernel build_forward_operator(const ModelParams& p, const TimeGrid& grid,
                                        const QuadratureSpec& q) {
  const int n = grid.steps();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  if (p.b() != 0.0) m = p.b() * kernel_cell_averages(p.hurst(), grid, q).matrix();
  for (int k = 0; k < n; ++k) m.row(k).head(k + 1).array() += p.a();
  return TriangularKernel(grid, std::move(m));
}

std::vector<double> inverse_operator_row(const InverseKernel& inverse, const TimeGrid& grid, int k) {
  if (k < 1 || k > grid.steps()) throw DomainError("inverse operator row out of range");
  const ModelParams& p = inverse.params();
  std::vector<double> row(k, 1.0 / p.a());
  if (p.b() == 0.0) return row;
  const CellRule cells = CellRule::increment_profile(p, grid);
  const double t = grid.node(k);
  auto series = [&](double s) { return inverse.series_part(t, s); };
  for (int j = 1; j <= k; ++j) row[j - 1] += cells.average(k, j, series) / p.a();
  return row;
}

TriangularKernel build_inverse_operator(const ModelParams& p, const TimeGrid& grid,
                                        const SeriesSpec& series, const QuadratureSpec& q) {
  const InverseKernel inverse(p, series, q);
  const int n = grid.steps();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m.triangularView<Eigen::Lower>().setConstant(1.0 / p.a());
  if (p.b() != 0.0) {
    const CellRule cells = CellRule::increment_profile(p, grid);
    parallel_for(1, n + 1, [&](int k) {
      const double t = grid.node(k);
      auto part = [&](double s) { return inverse.series_part(t, s); };
      for (int j = 1; j <= k; ++j) m(k - 1, j - 1) += cells.average(k, j, part) / p.a();
    });
  }
  return TriangularKernel(grid, std::move(m));
}

TriangularKernel numeric_inverse_operator(const TriangularKernel& forward) {
  const int n = forward.size();
  Eigen::MatrixXd inv = forward.matrix().triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(n, n));
  // S A: cumulative sums down columns; A S: reverse cumulative sums along rows.
  for (int r = 1; r < n; ++r) inv.row(r) += inv.row(r - 1);
  for (int c = n - 2; c >= 0; --c) inv.col(c) += inv.col(c + 1);
  return TriangularKernel(forward.grid(), std::move(inv));
}

Eigen::MatrixXd difference_rows(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd out = a;
  for (Eigen::Index r = a.rows() - 1; r >= 1; --r) out.row(r) -= a.row(r - 1);
  return out;
}

Eigen::MatrixXd difference_cols(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd out = a;
  for (Eigen::Index c = 0; c + 1 < a.cols(); ++c) out.col(c) -= a.col(c + 1);
  return out;
}

double identity_residual(const TriangularKernel& forward, const TriangularKernel& inverse) {
  if (!(forward.grid() == inverse.grid())) throw DomainError("operators live on different grids");
  const Eigen::MatrixXd increments = difference_cols(difference_rows(inverse.matrix()));
  const Eigen::MatrixXd product = forward.matrix() * increments;
  const int n = forward.size();
  return (product - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

SampledFunction apply_lstar(const TriangularKernel& forward, const SampledFunction& f) {
  if (!(forward.grid() == f.grid)) throw DomainError("function and operator grids differ");
  const int n = forward.size();
  const Eigen::Map<const Eigen::VectorXd> fv(f.values.data(), n);
  const Eigen::VectorXd out = difference_rows(forward.matrix()).transpose() * fv;
  return SampledFunction(f.grid, std::vector<double>(out.data(), out.data() + n));
}

SampledFunction apply_lstar(const ModelParams& p, const SampledFunction& f,
                            const QuadratureSpec& q) {
  return apply_lstar(build_forward_operator(p, f.grid, q), f);
}

SampledFunction apply_lstar_inverse(const TriangularKernel& inverse, const SampledFunction& f) {
  if (!(inverse.grid() == f.grid)) throw DomainError("function and operator grids differ");
  const int n = inverse.size();
  const auto& m = inverse.matrix();
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) {
    const double fj = f.values[j];
    double acc = fj * m(n - 1, j);
    for (int k = j + 1; k < n; ++k) acc += (f.values[k] - fj) * (m(k, j) - m(k - 1, j));
    out[j] = acc;
  }
  return SampledFunction(f.grid, std::move(out));
}

SampledFunction apply_lstar_inverse(const ModelParams& p, const SampledFunction& f,
                                    const SeriesSpec& series, const QuadratureSpec& q) {
  return apply_lstar_inverse(build_inverse_operator(p, f.grid, series, q), f);
}

namespace {

// Trapezoid composition on the nodes t_j..t_k of int_{t_j}^{t_k} l(t_k,u) m(u,t_j) du.
Eigen::MatrixXd compose(const Eigen::MatrixXd& l, const Eigen::MatrixXd& m, double dt) {
  Eigen::MatrixXd p = l.triangularView<Eigen::Lower>() * m;
  const Eigen::VectorXd ldiag = l.diagonal();
  const Eigen::VectorXd mdiag = m.diagonal();
  p -= 0.5 * (l * mdiag.asDiagonal());
  p -= 0.5 * (ldiag.asDiagonal() * m);
  p *= dt;
  p.triangularView<Eigen::StrictlyUpper>().setZero();
  return p;
}

}  // namespace

TriangularKernel resolvent_kernel(const TriangularKernel& ell, const TimeGrid& grid,
                                  const ResolventOptions& options) {
  if (!(ell.grid() == grid)) throw DomainError("kernel and grid differ");
  if (!ell.is_lower_triangular()) throw DomainError("resolvent requires a lower-triangular kernel");
  const int n = grid.steps();
  const int cap = options.max_iterations > 0 ? options.max_iterations : n;
  const Eigen::MatrixXd& l = ell.matrix();
  Eigen::MatrixXd term = l;
  Eigen::MatrixXd sum = l;
  double previous = term.cwiseAbs().maxCoeff();
  int growth = 0;
  for (int it = 1; it < cap && previous >= options.tol; ++it) {
    term = compose(l, term, grid.step());
    sum += term;
    const double norm = term.cwiseAbs().maxCoeff();
    if (!std::isfinite(norm)) throw NumericalError("resolvent series produced a non-finite term");
    growth = norm > previous ? growth + 1 : 0;
    previous = norm;
  }
  if (previous >= options.tol) {
    if (cap > 1 && growth >= cap - 1) {
      throw NumericalError("resolvent series diverges: term norms grew in all " +
                           std::to_string(cap) + " iterations");
    }
    warn("resolvent series stopped after " + std::to_string(cap) + " iterations at term norm " +
         format_number(previous));
  }
  return TriangularKernel(grid, std::move(sum));
}

}  // namespace ccmfbm
