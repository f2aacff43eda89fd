#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bfi/constant_estimate.hpp"
#include "bfi/measures.hpp"
#include "bfi/potentials.hpp"

namespace bfi {

/// FI values below this make the ratio meaningless.
inline constexpr double kFisherFloor = 1e-12;

/// 2·KL(ν‖μ)/FI(ν‖μ); a lower bound on C_LS(μ).
double lsi_ratio(const TestDensity& nu, const GibbsGrid& mu);

/// Gradient of 2·KL/FI with respect to log-mass coordinates θ (q ∝ e^θ)
/// on ν's support; zero off the support.
std::vector<double> lsi_ratio_gradient(const TestDensity& nu, const GibbsGrid& mu);

struct TestFamilyOptions {
  std::size_t coarse_points = 81;
  double sigma_tol = 1e-3;  // in log σ
  double x0_tol = 1e-6;
};

/// Maximizes lsi_ratio over truncated Gaussians N(x0, σ²) with
/// σ ∈ [min(t, √t), max(t, √t)] (1D). Diagnostics: x0, sigma, evaluations,
/// clamped (1 when the optimum sits on the admissible x0 range edge).
ConstantEstimate ls_lower_bound_search(const GibbsGrid& mu, const TestFamilyOptions& options = {});

/// Ascent on 2·KL/FI in log-mass coordinates over the init's support.
/// `step` is the largest log-mass change per iteration; two consecutive
/// decreases halve it and restart from the best iterate, and the run ends
/// after 10 halvings. Returns the best ratio visited. Diagnostics:
/// init_ratio, iterations, halvings, final_step, exhausted.
ConstantEstimate ls_variational(const GibbsGrid& mu, const TestDensity& init, std::size_t iters, double step);

/// Defective LSI constants (C, D) = (t·C_PL, max(0, C_PL·L0 − d)).
/// Requires L1 = 0 and a finite PL constant.
std::pair<double, double> defective_lsi_constants(const Potential& p, double t,
                                                  std::optional<double> c_pl = std::nullopt);

/// C + (D/2)·C_P.
double tighten(double C, double D, double C_P);
/// C + (D/2 + 1)·C_P.
double rothaus_tighten(double C, double D, double C_P);

/// tighten(defective constants, poincare_spectral(mu)); lower = C_P.
ConstantEstimate ls_upper_bound(const GibbsGrid& mu, std::optional<double> c_pl = std::nullopt);
ConstantEstimate ls_upper_bound(PotentialPtr p, double t, double resolution = 200.0);

}  // namespace bfi
