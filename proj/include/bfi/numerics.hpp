#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>

namespace bfi::numerics {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(e^a + e^b), safe for a or b = −∞.
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sum_exp(std::span<const double> v);

struct Extremum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a maximum of a unimodal function on [a, b].
/// Stops when the bracket is shorter than `tol`; the returned point is the
/// best evaluated one (the endpoints are evaluated too).
Extremum golden_section_max(const std::function<double(double)>& fn, double a, double b,
                            double tol, int max_iter = 200);

}  // namespace bfi::numerics
