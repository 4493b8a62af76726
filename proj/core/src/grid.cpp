#include "ccmfbm/grid.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "ccmfbm/errors.hpp"

namespace ccmfbm {

TimeGrid::TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("grid horizon must be > 0");
  if (steps < 2) throw DomainError("grid must have at least 2 steps");
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(steps_ + 1);
  for (int k = 0; k <= steps_; ++k) out[k] = node(k);
  return out;
}

int TimeGrid::index_of(double t) const {
  const double scaled = t / horizon_ * steps_;
  const long k = std::lround(scaled);
  if (k < 0 || k > steps_) return -1;
  if (std::abs(scaled - static_cast<double>(k)) > 1e-9) return -1;
  return static_cast<int>(k);
}

TimeGrid TimeGrid::prefix(int k) const {
  if (k < 2 || k > steps_) throw DomainError("prefix grid needs 2 <= k <= N");
  return TimeGrid(node(k), k);
}

SampledFunction::SampledFunction(TimeGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.steps()) {
    throw DomainError("sampled function length must equal the number of grid cells");
  }
}

SampledFunction SampledFunction::indicator(const TimeGrid& g, int k) {
  if (k < 0 || k > g.steps()) throw DomainError("indicator index out of range");
  std::vector<double> v(g.steps(), 0.0);
  for (int j = 0; j < k; ++j) v[j] = 1.0;
  return SampledFunction(g, std::move(v));
}

TriangularKernel::TriangularKernel(TimeGrid grid, Eigen::MatrixXd entries)
    : grid_(grid), entries_(std::move(entries)) {
  if (entries_.rows() != grid_.steps() || entries_.cols() != grid_.steps()) {
    throw DomainError("triangular kernel must be N x N for its grid");
  }
  entries_.triangularView<Eigen::StrictlyUpper>().setZero();
}

TriangularKernel::TriangularKernel(TimeGrid grid)
    : grid_(grid), entries_(Eigen::MatrixXd::Zero(grid.steps(), grid.steps())) {}

bool TriangularKernel::is_lower_triangular(double tol) const {
  for (int r = 0; r < size(); ++r)
    for (int c = r + 1; c < size(); ++c)
      if (std::abs(entries_(r, c)) > tol) return false;
  return true;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_kernel_csv(std::ostream& out, const TriangularKernel& kernel) {
  out << "row,col,value\n";
  for (int r = 0; r < kernel.size(); ++r) {
    for (int c = 0; c <= r; ++c) {
      out << (r + 1) << ',' << (c + 1) << ',' << format_double(kernel(r, c)) << '\n';
    }
  }
}

}  // namespace ccmfbm
