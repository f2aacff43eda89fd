#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bfi {

using Point = std::vector<double>;

/// String-valued parameter map, as read from config files.
using Params = std::map<std::string, std::string>;

/// Bounds that make Δf ≤ L0 + L1‖∇f‖² hold on the working domain, plus
/// optional Hessian operator-norm (beta) and third-derivative Lipschitz
/// (gamma) constants.
struct Smoothness {
  double L0 = 0.0;
  double L1 = 0.0;
  std::optional<double> beta;
  std::optional<double> gamma;
};

struct AnalyticConstants {
  std::optional<double> c_pl;
  bool pl_divergent = false;
  std::optional<double> lambda_min_at_min;
};

/// Axis-aligned box [lo_k, hi_k] per coordinate.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box cube(std::size_t dim, double half_width);
  bool contains(std::span<const double> x) const;
};

/// A C² potential with exact derivatives and landscape metadata.
///
/// Evaluators are pure and allocation-free; `grad` writes d entries and
/// `hess` writes a row-major d×d block into the caller's buffer. Instances
/// are immutable once built and shared through `PotentialPtr`.
struct Potential {
  using Value = std::function<double(std::span<const double>)>;
  using Gradient = std::function<void(std::span<const double>, std::span<double>)>;
  using Hessian = std::function<void(std::span<const double>, std::span<double>)>;

  std::string name;
  std::size_t dim = 1;
  Value f;
  Gradient grad;
  Hessian hess;
  std::optional<Point> minimizer;
  std::optional<double> f_star;
  Smoothness smoothness;
  AnalyticConstants analytic;
  Box domain;
  /// Factors of a separable sum f(x, y) = f1(x) + f2(y); empty otherwise.
  std::vector<std::shared_ptr<const Potential>> components;

  double value(std::span<const double> x) const { return f(x); }
  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  double laplacian(std::span<const double> x) const;
  double grad_norm_sq(std::span<const double> x) const;
  /// Smallest Hessian eigenvalue at x (d ≤ 2).
  double hessian_lambda_min(std::span<const double> x) const;
  bool separable() const { return !components.empty(); }
};

using PotentialPtr = std::shared_ptr<const Potential>;

/// Registered families: quadratic(alpha), quartic(a, b), sine_squared(c),
/// double_well, gaussian_mixture(m, w) and the 2D combinator
/// separable(x = <family>, x.<param> = ..., y = <family>, y.<param> = ...).
PotentialPtr get_potential(const std::string& name, const Params& params = {});

PotentialPtr make_quadratic(double alpha);
PotentialPtr make_quartic(double a, double b);
PotentialPtr make_sine_squared(double c);
PotentialPtr make_double_well();
PotentialPtr make_gaussian_mixture(double separation, double weight);
PotentialPtr make_separable(PotentialPtr fx, PotentialPtr fy);

std::vector<std::string> registered_potentials();

struct ProbeDiscrepancy {
  Point probe;
  double grad_error = 0.0;
  double hess_error = 0.0;
};

struct DerivativeReport {
  std::vector<ProbeDiscrepancy> probes;
  double max_grad_error = 0.0;
  double max_hess_error = 0.0;
  bool passed = true;
  /// Index of the first probe exceeding tolerance, if any.
  std::optional<std::size_t> failing_probe;
  std::string message;
};

/// Finite-difference step used by the derivative self-checks.
inline constexpr double kDerivativeStep = 1e-5;

/// Compare grad and hess against centered differences of f and grad.
/// Errors are |fd − exact| / max(1, |exact|), maximized over components.
DerivativeReport check_derivatives(const Potential& p, const std::vector<Point>& probes,
                                   double tol);

struct SmoothnessReport {
  double max_violation = 0.0;  // max over probes of Δf − L0 − L1‖∇f‖²
  std::optional<std::size_t> witness;
  bool honest() const { return max_violation <= 1e-9; }
};

SmoothnessReport check_smoothness(const Potential& p, const std::vector<Point>& probes);

/// Uniform probes on the working domain: n per axis (tensor grid in 2D).
std::vector<Point> uniform_probes(const Potential& p, std::size_t n_per_axis);

}  // namespace bfi
