#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmsim {

using cplx = std::complex<double>;

/// Raised when an input violates an operation's documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a layout would exceed the configured total dimension.
class DimensionCapError : public std::length_error {
 public:
  explicit DimensionCapError(const std::string& what) : std::length_error(what) {}
};

/// Size limits shared by every module.
///
/// `dimension_cap` bounds any layout. `dense_cap` bounds matrices on the main
/// path (density matrices, sector projectors). `oracle_cap` bounds the
/// Kronecker-built reference matrices used to cross-check the kernels.
struct Limits {
  std::size_t dimension_cap = std::size_t{1} << 14;
  std::size_t dense_cap = std::size_t{1} << 10;
  std::size_t oracle_cap = 64;
};

inline constexpr double kDefaultTolerance = 1e-12;
inline constexpr double kDegeneracyTolerance = 1e-9;

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace qmsim
