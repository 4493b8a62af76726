#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace ccmfbm {

/// Argument outside the mathematical domain of a formula (H outside (1/2,1), s <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure could not deliver a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The inverse-kernel series needed more terms than SeriesSpec::max_terms allows.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

using WarningHandler = std::function<void(const std::string&)>;

/// Replaces the warning sink (default: one line on stderr). Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

/// Reports a recoverable numerical event, such as Cholesky jitter.
void warn(const std::string& message);

/// Short %g rendering of a number for diagnostics.
std::string format_number(double value);

}  // namespace ccmfbm
