#include "bfi/potentials.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "bfi/error.hpp"

namespace bfi {

namespace {

constexpr double kWorkingHalfWidth = 20.0;

using Scalar1D = std::function<double(double)>;

std::shared_ptr<Potential> make_1d(std::string name, Scalar1D f, Scalar1D df, Scalar1D d2f) {
  auto p = std::make_shared<Potential>();
  p->name = std::move(name);
  p->dim = 1;
  p->f = [f](std::span<const double> x) { return f(x[0]); };
  p->grad = [df](std::span<const double> x, std::span<double> g) { g[0] = df(x[0]); };
  p->hess = [d2f](std::span<const double> x, std::span<double> h) { h[0] = d2f(x[0]); };
  p->domain = Box::cube(1, kWorkingHalfWidth);
  return p;
}

double param(const Params& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("parameter '" + key + "' is not a number: " + it->second);
  }
}

Params sub_params(const Params& params, const std::string& prefix) {
  Params out;
  for (const auto& [k, v] : params) {
    if (k.size() > prefix.size() + 1 && k.compare(0, prefix.size(), prefix) == 0 &&
        k[prefix.size()] == '.') {
      out.emplace(k.substr(prefix.size() + 1), v);
    }
  }
  return out;
}

double log_add_exp(double a, double b) {
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

Box Box::cube(std::size_t dim, double half_width) {
  return Box{std::vector<double>(dim, -half_width), std::vector<double>(dim, half_width)};
}

bool Box::contains(std::span<const double> x) const {
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] < lo[k] || x[k] > hi[k]) return false;
  }
  return true;
}

double Potential::value(double x) const {
  std::array<double, 1> p{x};
  return f(p);
}

double Potential::derivative(double x) const {
  std::array<double, 1> p{x};
  std::array<double, 1> g{};
  grad(p, g);
  return g[0];
}

double Potential::second_derivative(double x) const {
  std::array<double, 1> p{x};
  std::array<double, 1> h{};
  hess(p, h);
  return h[0];
}

double Potential::laplacian(std::span<const double> x) const {
  std::array<double, 4> h{};
  hess(x, std::span<double>(h.data(), dim * dim));
  double tr = 0.0;
  for (std::size_t k = 0; k < dim; ++k) tr += h[k * dim + k];
  return tr;
}

double Potential::grad_norm_sq(std::span<const double> x) const {
  std::array<double, 2> g{};
  grad(x, std::span<double>(g.data(), dim));
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) s += g[k] * g[k];
  return s;
}

double Potential::hessian_lambda_min(std::span<const double> x) const {
  std::array<double, 4> h{};
  hess(x, std::span<double>(h.data(), dim * dim));
  if (dim == 1) return h[0];
  double a = h[0], b = 0.5 * (h[1] + h[2]), c = h[3];
  double mean = 0.5 * (a + c);
  double rad = std::hypot(0.5 * (a - c), b);
  return mean - rad;
}

PotentialPtr make_quadratic(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0, "quadratic: alpha must be > 0");
  auto p = make_1d(
      "quadratic", [alpha](double x) { return 0.5 * alpha * x * x; },
      [alpha](double x) { return alpha * x; }, [alpha](double) { return alpha; });
  p->minimizer = Point{0.0};
  p->f_star = 0.0;
  p->smoothness = {alpha, 0.0, alpha, 0.0};
  p->analytic = {1.0 / alpha, false, alpha};
  return p;
}

PotentialPtr make_quartic(double a, double b) {
  require(std::isfinite(a) && a > 0.0, "quartic: a must be > 0");
  require(std::isfinite(b) && b >= 0.0, "quartic: b must be >= 0");
  auto p = make_1d(
      "quartic", [a, b](double x) { double x2 = x * x; return 0.5 * a * x2 + 0.25 * b * x2 * x2; },
      [a, b](double x) { return a * x + b * x * x * x; },
      [a, b](double x) { return a + 3.0 * b * x * x; });
  p->minimizer = Point{0.0};
  p->f_star = 0.0;
  // 3b x² ≤ (3b/a²) x² (a + b x²)² = L1 ‖∇f‖².
  p->smoothness.L0 = a;
  p->smoothness.L1 = 3.0 * b / (a * a);
  if (b == 0.0) p->smoothness.beta = a;
  // r(x) = (a + b x²/2) / (a + b x²)² peaks at x = 0.
  p->analytic = {1.0 / a, false, a};
  return p;
}

PotentialPtr make_sine_squared(double c) {
  require(std::isfinite(c) && c > -1.0 && c <= 1.0,
          "sine_squared: c must lie in (-1, 1] for a unique non-degenerate minimizer");
  auto p = make_1d(
      "sine_squared", [c](double x) { double s = std::sin(x); return x * x + c * s * s; },
      [c](double x) { return 2.0 * x + c * std::sin(2.0 * x); },
      [c](double x) { return 2.0 + 2.0 * c * std::cos(2.0 * x); });
  p->minimizer = Point{0.0};
  p->f_star = 0.0;
  double bound = 2.0 + 2.0 * std::abs(c);
  p->smoothness = {bound, 0.0, bound, 4.0 * std::abs(c)};
  p->analytic.lambda_min_at_min = 2.0 + 2.0 * c;
  return p;
}

PotentialPtr make_double_well() {
  auto p = make_1d(
      "double_well", [](double x) { double u = x * x - 1.0; return u * u; },
      [](double x) { return 4.0 * x * (x * x - 1.0); },
      [](double x) { return 12.0 * x * x - 4.0; });
  // Two global minimizers at ±1: no unique minimizer to declare.
  p->f_star = 0.0;
  // 12x² − 4 ≤ 10 + 16x²(x² − 1)² on the real line.
  p->smoothness = {10.0, 1.0, std::nullopt, std::nullopt};
  p->analytic.pl_divergent = true;
  return p;
}

PotentialPtr make_gaussian_mixture(double separation, double weight) {
  require(std::isfinite(separation) && separation > 0.0, "gaussian_mixture: m must be > 0");
  require(weight > 0.0 && weight < 1.0, "gaussian_mixture: w must lie in (0, 1)");
  const double m = separation;
  const double lw = std::log(weight), lv = std::log1p(-weight);
  // −log(w N(m, 1) + (1 − w) N(−m, 1)) up to an additive constant.
  auto posterior = [m, lw, lv](double x) {
    double a = lw + m * x, b = lv - m * x;
    return 1.0 / (1.0 + std::exp(b - a));
  };
  auto p = make_1d(
      "gaussian_mixture",
      [m, lw, lv](double x) { return 0.5 * (x * x + m * m) - log_add_exp(lw + m * x, lv - m * x); },
      [m, posterior](double x) { double pi = posterior(x); return x - m * (2.0 * pi - 1.0); },
      [m, posterior](double x) { double pi = posterior(x); return 1.0 - 4.0 * m * m * pi * (1.0 - pi); });
  p->smoothness = {1.0, 0.0, std::max(1.0, std::abs(1.0 - m * m)), std::nullopt};
  p->analytic.pl_divergent = m > 1.0;
  return p;
}

PotentialPtr make_separable(PotentialPtr fx, PotentialPtr fy) {
  require(fx && fy && fx->dim == 1 && fy->dim == 1, "separable: both factors must be 1D");
  auto p = std::make_shared<Potential>();
  p->name = "separable(" + fx->name + "," + fy->name + ")";
  p->dim = 2;
  p->f = [fx, fy](std::span<const double> x) { return fx->value(x[0]) + fy->value(x[1]); };
  p->grad = [fx, fy](std::span<const double> x, std::span<double> g) {
    g[0] = fx->derivative(x[0]);
    g[1] = fy->derivative(x[1]);
  };
  p->hess = [fx, fy](std::span<const double> x, std::span<double> h) {
    h[0] = fx->second_derivative(x[0]);
    h[1] = 0.0;
    h[2] = 0.0;
    h[3] = fy->second_derivative(x[1]);
  };
  p->domain = Box{{fx->domain.lo[0], fy->domain.lo[0]}, {fx->domain.hi[0], fy->domain.hi[0]}};
  if (fx->minimizer && fy->minimizer) p->minimizer = Point{(*fx->minimizer)[0], (*fy->minimizer)[0]};
  if (fx->f_star && fy->f_star) p->f_star = *fx->f_star + *fy->f_star;
  p->smoothness.L0 = fx->smoothness.L0 + fy->smoothness.L0;
  p->smoothness.L1 = std::max(fx->smoothness.L1, fy->smoothness.L1);
  if (fx->smoothness.beta && fy->smoothness.beta)
    p->smoothness.beta = std::max(*fx->smoothness.beta, *fy->smoothness.beta);
  if (fx->smoothness.gamma && fy->smoothness.gamma)
    p->smoothness.gamma = std::max(*fx->smoothness.gamma, *fy->smoothness.gamma);
  // The PL ratio of a sum is at most the larger factor ratio (mediant), and
  // that value is attained along an axis.
  p->analytic.pl_divergent = fx->analytic.pl_divergent || fy->analytic.pl_divergent;
  if (fx->analytic.c_pl && fy->analytic.c_pl)
    p->analytic.c_pl = std::max(*fx->analytic.c_pl, *fy->analytic.c_pl);
  if (fx->analytic.lambda_min_at_min && fy->analytic.lambda_min_at_min)
    p->analytic.lambda_min_at_min =
        std::min(*fx->analytic.lambda_min_at_min, *fy->analytic.lambda_min_at_min);
  p->components = {std::move(fx), std::move(fy)};
  return p;
}

std::vector<std::string> registered_potentials() {
  return {"quadratic", "quartic", "sine_squared", "double_well", "gaussian_mixture", "separable"};
}

PotentialPtr get_potential(const std::string& name, const Params& params) {
  if (name == "quadratic") return make_quadratic(param(params, "alpha", 1.0));
  if (name == "quartic") return make_quartic(param(params, "a", 1.0), param(params, "b", 1.0));
  if (name == "sine_squared") return make_sine_squared(param(params, "c", 1.0));
  if (name == "double_well") return make_double_well();
  if (name == "gaussian_mixture")
    return make_gaussian_mixture(param(params, "m", 2.0), param(params, "w", 0.5));
  if (name == "separable") {
    auto x = params.find("x");
    auto y = params.find("y");
    require(x != params.end() && y != params.end(), "separable: needs 'x' and 'y' families");
    require(x->second != "separable" && y->second != "separable",
            "separable: factors must be one-dimensional families");
    return make_separable(get_potential(x->second, sub_params(params, "x")),
                          get_potential(y->second, sub_params(params, "y")));
  }
  throw PreconditionError("unknown potential family: " + name);
}

DerivativeReport check_derivatives(const Potential& p, const std::vector<Point>& probes,
                                   double tol) {
  const std::size_t d = p.dim;
  const double h = kDerivativeStep;
  DerivativeReport report;
  std::array<double, 2> g{}, gp{}, gm{};
  std::array<double, 4> H{};
  for (std::size_t i = 0; i < probes.size(); ++i) {
    Point x = probes[i];
    require(x.size() == d, "check_derivatives: probe dimension mismatch");
    p.grad(x, std::span<double>(g.data(), d));
    p.hess(x, std::span<double>(H.data(), d * d));
    ProbeDiscrepancy row{x, 0.0, 0.0};
    for (std::size_t k = 0; k < d; ++k) {
      Point xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      double fp = p.f(xp), fm = p.f(xm);
      if (!std::isfinite(fp) || !std::isfinite(fm) || !std::isfinite(g[k])) {
        std::ostringstream os;
        os << "check_derivatives: non-finite evaluation at probe " << i;
        throw NumericalError(os.str());
      }
      double fd = (fp - fm) / (2.0 * h);
      row.grad_error = std::max(row.grad_error, std::abs(fd - g[k]) / std::max(1.0, std::abs(g[k])));
      p.grad(xp, std::span<double>(gp.data(), d));
      p.grad(xm, std::span<double>(gm.data(), d));
      for (std::size_t j = 0; j < d; ++j) {
        double fdh = (gp[j] - gm[j]) / (2.0 * h);
        double exact = H[j * d + k];
        if (!std::isfinite(fdh) || !std::isfinite(exact))
          throw NumericalError("check_derivatives: non-finite Hessian evaluation");
        row.hess_error =
            std::max(row.hess_error, std::abs(fdh - exact) / std::max(1.0, std::abs(exact)));
      }
    }
    report.max_grad_error = std::max(report.max_grad_error, row.grad_error);
    report.max_hess_error = std::max(report.max_hess_error, row.hess_error);
    if ((row.grad_error > tol || row.hess_error > tol) && !report.failing_probe) {
      report.passed = false;
      report.failing_probe = i;
      std::ostringstream os;
      os << p.name << ": derivative mismatch at probe " << i << " (x = " << x[0];
      if (d == 2) os << ", " << x[1];
      os << "): grad error " << row.grad_error << ", hess error " << row.hess_error;
      report.message = os.str();
    }
    report.probes.push_back(std::move(row));
  }
  return report;
}

SmoothnessReport check_smoothness(const Potential& p, const std::vector<Point>& probes) {
  SmoothnessReport report{-std::numeric_limits<double>::infinity(), std::nullopt};
  for (std::size_t i = 0; i < probes.size(); ++i) {
    double v = p.laplacian(probes[i]) - p.smoothness.L0 - p.smoothness.L1 * p.grad_norm_sq(probes[i]);
    if (v > report.max_violation) {
      report.max_violation = v;
      report.witness = i;
    }
  }
  return report;
}

std::vector<Point> uniform_probes(const Potential& p, std::size_t n_per_axis) {
  require(n_per_axis >= 2, "uniform_probes: need at least two probes per axis");
  auto coord = [&](std::size_t k, std::size_t i) {
    return p.domain.lo[k] + (p.domain.hi[k] - p.domain.lo[k]) * static_cast<double>(i) /
                                static_cast<double>(n_per_axis - 1);
  };
  std::vector<Point> out;
  if (p.dim == 1) {
    for (std::size_t i = 0; i < n_per_axis; ++i) out.push_back({coord(0, i)});
  } else {
    for (std::size_t i = 0; i < n_per_axis; ++i)
      for (std::size_t j = 0; j < n_per_axis; ++j) out.push_back({coord(0, i), coord(1, j)});
  }
  return out;
}

}  // namespace bfi
