#pragma once

#include <stdexcept>
#include <string>

namespace silevy {

/// Corner coordinate not on the 2^-n grid of the requested dissection level.
class AlignmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation needs a set of positive measure.
class DegenerateSetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Numeric grid problems: mismatched steps, failed Fourier inversion.
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature or root-finding failed to converge.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Semilattice not intersection-closed or not consistently ordered.
class ConsistencyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mark set whose closure touches 0, or refinement below the spec truncation.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed configuration or spec literal. `field` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace silevy
