#pragma once

#include <optional>
#include <vector>

#include "bfi/constant_estimate.hpp"
#include "bfi/potentials.hpp"

namespace bfi {

/// Probes with r(x) above this (and a non-trivial gap) declare C_PL = ∞.
inline constexpr double kPlDivergenceThreshold = 1e6;

/// Static PL constant: sup of r(x) = 2(f(x) − f*)/‖∇f(x)‖² over a uniform
/// grid on `domain` (`resolution` points per unit), refined by golden
/// section around the grid argmax. Points with ‖∇f‖ < 1e−9 and
/// f − f* < 1e−12 are excluded. Diagnostics: argmax (argmax_y in 2D),
/// resolution, grid_points, f_star; divergent estimates also carry witness.
ConstantEstimate pl_constant_static(const Potential& p, const Box& domain, double resolution);
ConstantEstimate pl_constant_static(const Potential& p, double resolution = 1000.0);

/// Dynamic PL constant: sup over initializations and geometric sample times
/// s ∈ {h, 2h, 4h, …, S} of 2s / log((f(x_0) − f*)/(f(x_s) − f*)).
ConstantEstimate pl_constant_dynamic(const Potential& p, const std::vector<Point>& initializations,
                                     double horizon, double step);

struct GrowthMargin {
  double margin = 0.0;
  Point witness;
  bool certified() const { return margin >= -1e-9; }
};

/// min over probes of (f(x) − f*) − ‖x − x*‖²/(2 C_PL).
GrowthMargin quadratic_growth_margin(const Potential& p, double c_pl, const std::vector<Point>& probes);

struct HessianFloor {
  double lambda_min = 0.0;
  bool passed = false;
};

/// λ_min(∇²f(x*)) and whether it is at least 1/C_PL − 1e−9.
HessianFloor hessian_floor_check(const Potential& p, double c_pl);

/// PL constant for downstream use: the closed form when registered,
/// otherwise a static estimate at `resolution`. Empty when divergent.
std::optional<double> resolve_c_pl(const Potential& p, double resolution = 200.0);

/// Throws PreconditionError("PL constant divergent ...") unless finite.
double require_finite_c_pl(const Potential& p, double resolution = 1000.0);

}  // namespace bfi
