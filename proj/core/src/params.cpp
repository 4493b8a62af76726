#include "ccmfbm/params.hpp"

#include <cmath>
#include <string>

#include "ccmfbm/errors.hpp"

namespace ccmfbm {

void require_long_range_hurst(double hurst) {
  if (!(hurst > 0.5 && hurst < 1.0)) {
    throw DomainError("Hurst index must lie in (1/2, 1), got " + format_number(hurst));
  }
}

ModelParams::ModelParams(double a, double b, double hurst) : a_(a), b_(b), hurst_(hurst) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("mixing weights must be finite");
  if (a * b == 0.0) throw DomainError("mixing weights must satisfy a*b != 0");
  require_long_range_hurst(hurst);
}

ModelParams::ModelParams(double a, double b, double hurst, NoCheck) : a_(a), b_(b), hurst_(hurst) {}

ModelParams ModelParams::unchecked(double a, double b, double hurst) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("mixing weights must be finite");
  if (!(hurst >= 0.5 && hurst < 1.0)) {
    throw DomainError("Hurst index must lie in [1/2, 1) even in unchecked mode");
  }
  return ModelParams(a, b, hurst, NoCheck{});
}

void QuadratureSpec::validate() const {
  if (node_count < 2) throw DomainError("QuadratureSpec::node_count must be >= 2");
  if (!(abs_tol >= 0.0)) throw DomainError("QuadratureSpec::abs_tol must be >= 0");
}

void SeriesSpec::validate() const {
  if (!(tol > 0.0)) throw DomainError("SeriesSpec::tol must be > 0");
  if (max_terms < 1) throw DomainError("SeriesSpec::max_terms must be >= 1");
}

}  // namespace ccmfbm
