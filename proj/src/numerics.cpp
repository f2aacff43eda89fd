#include "bfi/numerics.hpp"

#include <algorithm>

#include "bfi/constant_estimate.hpp"

namespace bfi {

std::string to_string(Method m) {
  switch (m) {
    case Method::grid: return "grid";
    case Method::refined: return "refined";
    case Method::dynamic: return "dynamic";
    case Method::spectral: return "spectral";
    case Method::muckenhoupt: return "muckenhoupt";
    case Method::lyapunov: return "lyapunov";
    case Method::testfamily: return "testfamily";
    case Method::variational: return "variational";
    case Method::tightened: return "tightened";
  }
  return "unknown";
}

namespace numerics {

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

Extremum golden_section_max(const std::function<double(double)>& fn, double a, double b,
                            double tol, int max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  Extremum best{a, fn(a), 1};
  auto consider = [&](double x, double v) {
    ++best.evaluations;
    if (v > best.value) {
      best.x = x;
      best.value = v;
    }
  };
  consider(b, fn(b));
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  consider(c, fc);
  consider(d, fd);
  for (int it = 0; it < max_iter && std::abs(b - a) > tol; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
      consider(d, fd);
    }
  }
  return best;
}

}  // namespace numerics
}  // namespace bfi
