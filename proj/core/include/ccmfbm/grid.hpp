#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ccmfbm {

/// Equidistant grid t_k = k T / N, k = 0..N, on [0, T].
///
/// Node t_0 = 0 carries the path start X(0) = 0 but never a kernel column: discretised
/// kernels and sampled functions are indexed by the cells (t_{j-1}, t_j], j = 1..N.
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  double step() const { return horizon_ / steps_; }
  double node(int k) const { return horizon_ * k / steps_; }
  std::vector<double> nodes() const;

  /// Index k with node(k) == t up to rounding, or -1 if t is not a node.
  int index_of(double t) const;

  /// Leading sub-grid [0, t_k] with the same step.
  TimeGrid prefix(int k) const;

  bool operator==(const TimeGrid& other) const = default;

 private:
  double horizon_;
  int steps_;
};

/// Function on [0, T] represented by one value per cell (t_{j-1}, t_j], j = 1..N.
/// values[j-1] belongs to cell j (equivalently to its right node t_j).
struct SampledFunction {
  TimeGrid grid;
  std::vector<double> values;

  SampledFunction(TimeGrid g, std::vector<double> v);

  /// Samples f at the right node of each cell.
  template <class F>
  static SampledFunction from_function(const TimeGrid& g, F&& f) {
    std::vector<double> v(g.steps());
    for (int j = 1; j <= g.steps(); ++j) v[j - 1] = f(g.node(j));
    return SampledFunction(g, std::move(v));
  }

  /// The indicator 1_[0, t_k): ones on cells 1..k.
  static SampledFunction indicator(const TimeGrid& g, int k);
};

/// Lower-triangular N x N discretisation of a Volterra kernel.
/// Row r (0-based) belongs to time t_{r+1}; column c to cell c+1 = (t_c, t_{c+1}].
/// Entries above the diagonal are zero.
class TriangularKernel {
 public:
  TriangularKernel(TimeGrid grid, Eigen::MatrixXd entries);
  explicit TriangularKernel(TimeGrid grid);

  const TimeGrid& grid() const { return grid_; }
  int size() const { return grid_.steps(); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double operator()(int row, int col) const { return entries_(row, col); }

  bool is_lower_triangular(double tol = 0.0) const;

 private:
  TimeGrid grid_;
  Eigen::MatrixXd entries_;
};

/// CSV with header `row,col,value` (1-based indices), lower triangle only.
void write_kernel_csv(std::ostream& out, const TriangularKernel& kernel);

/// Formats a double with 17 significant digits, '.' decimal separator.
std::string format_double(double value);

}  // namespace ccmfbm
