#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace gaussreach {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kPi = std::numbers::pi;

/// Raised when a linear-algebra step fails beyond recovery (factorization
/// breakdown, rank collapse without a tolerant fallback). The CLI maps this
/// to its own exit code, distinct from usage errors.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gaussreach
