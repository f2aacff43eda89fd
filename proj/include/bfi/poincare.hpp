#pragma once

#include <optional>
#include <vector>

#include "bfi/constant_estimate.hpp"
#include "bfi/measures.hpp"
#include "bfi/potentials.hpp"

namespace bfi {

/// 1/λ_1 of the Neumann Dirichlet-form discretization of −L_μ, with
/// midpoint edge masses and diagonal node masses. The certified lower end
/// is the Rayleigh quotient of the coordinate function. 2D grids are
/// supported for separable potentials (max over the factor constants).
/// Diagnostics: lambda1, lambda2, nodes.
ConstantEstimate poincare_spectral(const GibbsGrid& mu);

struct MuckenhouptBracket {
  double lower = 0.0;  // B
  double upper = 0.0;  // 4B
  double median = 0.0;
  bool contains(double v) const { return lower <= v && v <= upper; }
};

/// Two-sided Hardy-type constant B = max over sides of
/// sup_x μ(beyond x) · ∫_median^x 1/p, from the grid masses (1D only).
MuckenhouptBracket muckenhoupt_bracket(const GibbsGrid& mu);

struct LyapunovParams {
  double c_pl = 1.0;
  double L0 = 0.0;
  double L1 = 0.0;
  double alpha = 1.0;
  double r0 = 1.0;
  double delta = 0.5;  // r0²/(2 C_PL)
  double k = 1.0;
  double t = 0.1;

  /// Fills delta from (r0, c_pl).
  static LyapunovParams make(double c_pl, double L0, double L1, double alpha, double r0, double k, double t);
  /// 2δ/(C_PL L0 + 2δ L1 + 2k − 2).
  double t0() const;
  /// Throws PreconditionError unless the parameters are admissible and t < t0.
  void validate() const;
};

/// Two-term upper bound on C_P(μ_t) for admissible parameters.
double lyapunov_bound_formula(const LyapunovParams& params);

/// min of λ_min(∇²f) over probes on the ball B(x*, r0).
double local_convexity(const Potential& p, double r0, std::size_t probes_per_axis = 401);

/// Scans the dyadic radius ladder 2^j (j = −6..3) with α(r0) from
/// `local_convexity` and returns the admissible pair with the smallest bound
/// at temperature t, or nothing if no radius admits t.
std::optional<LyapunovParams> select_lyapunov_params(const Potential& p, double t, double k = 1.0,
                                                     std::optional<double> c_pl = std::nullopt);

/// Largest ladder radius with local convexity at least `alpha`.
std::optional<double> largest_radius_for(const Potential& p, double alpha);

struct LyapunovCheck {
  double lambda = 0.0;
  double b = 0.0;
  double min_margin = 0.0;
  Point witness;
  std::size_t witness_index = 0;
  bool certified() const { return min_margin >= -1e-9; }
};

/// Evaluates −LW/W − λ(1 − b·1_K) at every node with W = (1 + (f − f*)/δ)^k,
/// K = B(x*, r0) and L = Δ − ∇f·∇/t. `lambda_scale` multiplies λ (fault
/// injection); b is kept at its constructed value.
LyapunovCheck lyapunov_criterion_verify(const GibbsGrid& mu, const LyapunovParams& params,
                                        double lambda_scale = 1.0);

}  // namespace bfi
