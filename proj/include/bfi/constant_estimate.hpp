#pragma once

#include <limits>
#include <map>
#include <string>

namespace bfi {

enum class Method {
  grid,
  refined,
  dynamic,
  spectral,
  muckenhoupt,
  lyapunov,
  testfamily,
  variational,
  tightened,
};

std::string to_string(Method m);

/// A constant with a certified bracket [lower, upper]; `upper` may be +∞.
/// `divergent` marks a constant declared infinite (value is then +∞).
struct ConstantEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  Method method = Method::grid;
  bool divergent = false;
  std::map<std::string, double> diagnostics;

  bool consistent() const { return lower <= value && value <= upper; }
};

}  // namespace bfi
