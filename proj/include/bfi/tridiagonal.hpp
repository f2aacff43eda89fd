#pragma once

#include <cstddef>
#include <vector>

namespace bfi {

/// Symmetric tridiagonal matrix: diag a_0..a_{n−1}, off-diagonal b_0..b_{n−2}.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }
  /// Number of eigenvalues strictly below x (Sturm count of T − xI).
  std::size_t count_below(double x) const;
  /// k-th smallest eigenvalue (0-based) by bisection; `rel_tol` is relative
  /// to the Gershgorin spread.
  double eigenvalue(std::size_t k, double rel_tol = 1e-15) const;
};

}  // namespace bfi
