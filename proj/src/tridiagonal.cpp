#include "bfi/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bfi/error.hpp"

namespace bfi {

std::size_t SymTridiagonal::count_below(double x) const {
  const std::size_t n = diag.size();
  std::size_t count = 0;
  double d = 1.0;
  const double tiny = std::numeric_limits<double>::min();
  for (std::size_t i = 0; i < n; ++i) {
    double b2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
    d = (diag[i] - x) - (i == 0 ? 0.0 : b2 / d);
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

double SymTridiagonal::eigenvalue(std::size_t k, double rel_tol) const {
  const std::size_t n = diag.size();
  require(n > 0 && off.size() + 1 == n, "SymTridiagonal: inconsistent sizes");
  require(k < n, "SymTridiagonal: eigenvalue index out of range");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double spread = std::max(hi - lo, std::numeric_limits<double>::min());
  lo -= 1e-12 * spread;
  hi += 1e-12 * spread;
  for (int it = 0; it < 400 && hi - lo > rel_tol * spread; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace bfi
