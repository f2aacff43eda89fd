#include "bfi/logsobolev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bfi/error.hpp"
#include "bfi/numerics.hpp"
#include "bfi/pl.hpp"
#include "bfi/poincare.hpp"

namespace bfi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using numerics::kNegInf;

}  // namespace

double lsi_ratio(const TestDensity& nu, const GibbsGrid& mu) {
  double fi = fisher_information(nu, mu);
  if (!(fi > kFisherFloor))
    throw PreconditionError("lsi_ratio: Fisher information below threshold (nu too close to mu)");
  return 2.0 * kl_divergence(nu, mu) / fi;
}

ConstantEstimate ls_lower_bound_search(const GibbsGrid& mu, const TestFamilyOptions& opt) {
  require(mu.dim() == 1, "ls_lower_bound_search: 1D grids only");
  require(opt.coarse_points >= 3, "ls_lower_bound_search: need at least three coarse points");
  const double t = mu.temperature();
  const double s_lo = std::log(std::min(t, std::sqrt(t)));
  const double s_hi = std::log(std::max(t, std::sqrt(t)));
  const double sigma_max = std::exp(s_hi);
  const auto& axis = mu.geometry().axes[0];
  double x_lo = axis.lo + 6.0 * sigma_max;
  double x_hi = axis.hi() - 6.0 * sigma_max;
  if (!(x_lo < x_hi)) {
    // Grid narrower than the family; fall back to the inner half.
    double c = 0.5 * (axis.lo + axis.hi());
    double half = 0.25 * (axis.hi() - axis.lo);
    x_lo = c - half;
    x_hi = c + half;
  }

  int evaluations = 0;
  auto ratio_at = [&](double x0, double log_sigma) {
    ++evaluations;
    try {
      return lsi_ratio(TestDensity::gaussian(mu, x0, std::exp(log_sigma)), mu);
    } catch (const PreconditionError&) {
      return kNegInf;  // ν ≈ μ or empty support
    }
  };
  auto best_sigma = [&](double x0) {
    return numerics::golden_section_max([&](double s) { return ratio_at(x0, s); }, s_lo, s_hi, opt.sigma_tol);
  };

  const std::size_t n = opt.coarse_points;
  auto coarse = [&](std::size_t i) { return x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(n - 1); };
  std::size_t best_i = 0;
  numerics::Extremum best{0.0, kNegInf, 0};
  for (std::size_t i = 0; i < n; ++i) {
    auto e = best_sigma(coarse(i));
    if (e.value > best.value) {
      best = e;
      best_i = i;
    }
  }
  if (!std::isfinite(best.value)) throw NumericalError("ls_lower_bound_search: no admissible test density");

  double best_x0 = coarse(best_i);
  double best_log_sigma = best.x;
  double best_value = best.value;
  double a = coarse(best_i > 0 ? best_i - 1 : 0);
  double b = coarse(std::min(best_i + 1, n - 1));
  auto refined = numerics::golden_section_max(
      [&](double x0) {
        auto e = best_sigma(x0);
        if (e.value > best_value) {
          best_value = e.value;
          best_x0 = x0;
          best_log_sigma = e.x;
        }
        return e.value;
      },
      a, b, opt.x0_tol);
  (void)refined;

  ConstantEstimate est;
  est.method = Method::testfamily;
  est.value = best_value;
  est.lower = best_value;
  est.upper = kInf;
  est.diagnostics["x0"] = best_x0;
  est.diagnostics["sigma"] = std::exp(best_log_sigma);
  est.diagnostics["evaluations"] = evaluations;
  bool clamped = best_x0 <= x_lo + 1e-12 * std::max(1.0, std::abs(x_lo)) ||
                 best_x0 >= x_hi - 1e-12 * std::max(1.0, std::abs(x_hi));
  est.diagnostics["clamped"] = clamped ? 1.0 : 0.0;
  return est;
}

namespace {

/// Ratio and its gradient in log-mass coordinates on a fixed support.
class RatioObjective {
 public:
  RatioObjective(const GibbsGrid& mu, const TestDensity& init) : mu_(mu), geo_(mu.geometry()) {
    const std::size_t n = init.size();
    support_.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) support_[i] = init.in_support(i);
    // κ_{i,k}: 1/(number of in-support neighbours along axis k).
    kappa_.assign(n * geo_.dim(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!support_[i]) continue;
      for (std::size_t k = 0; k < geo_.dim(); ++k) {
        int c = 0;
        if (has_left(i, k)) ++c;
        if (has_right(i, k)) ++c;
        kappa_[i * geo_.dim() + k] = c > 0 ? 1.0 / c : 0.0;
      }
    }
  }

  /// Returns R; fills q, u, and (when grad is non-null) dR/dθ.
  double evaluate(const std::vector<double>& theta, std::vector<double>* grad) {
    const std::size_t n = theta.size();
    const auto lw = mu_.log_weights();
    double lse = numerics::log_sum_exp(theta);
    q_.assign(n, 0.0);
    u_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!support_[i]) continue;
      double lq = theta[i] - lse;
      q_[i] = std::exp(lq);
      u_[i] = lq - lw[i];
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (support_[i] && q_[i] > 0.0) kl += q_[i] * u_[i];
    // g_i = Σ_k κ_{i,k} Σ_{neighbours} (Δu/h)², FI = Σ q_i g_i.
    g_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!support_[i]) continue;
      for (std::size_t k = 0; k < geo_.dim(); ++k) {
        const double h = geo_.axes[k].step;
        const std::size_t s = geo_.stride(k);
        double sum = 0.0;
        if (has_left(i, k)) sum += sq((u_[i - s] - u_[i]) / h);
        if (has_right(i, k)) sum += sq((u_[i + s] - u_[i]) / h);
        g_[i] += kappa_[i * geo_.dim() + k] * sum;
      }
    }
    double fi = 0.0;
    for (std::size_t i = 0; i < n; ++i) fi += q_[i] * g_[i];
    if (!(fi > kFisherFloor)) throw PreconditionError("ls_variational: Fisher information below threshold");
    kl = std::max(kl, 0.0);
    const double r = 2.0 * kl / fi;
    if (!std::isfinite(r)) throw NumericalError("ls_variational: non-finite ratio");
    if (grad) {
      std::vector<double>& gr = *grad;
      gr.assign(n, 0.0);
      std::vector<double> dfi(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        if (support_[i]) dfi[i] = q_[i] * (g_[i] - fi);
      for (std::size_t i = 0; i < n; ++i) {
        if (!support_[i]) continue;
        for (std::size_t k = 0; k < geo_.dim(); ++k) {
          if (!has_right(i, k)) continue;
          const std::size_t j = i + geo_.stride(k);
          const double h2 = sq(geo_.axes[k].step);
          const double c = (kappa_[i * geo_.dim() + k] * q_[i] + kappa_[j * geo_.dim() + k] * q_[j]) / h2;
          const double du = u_[j] - u_[i];
          dfi[j] += 2.0 * c * du;
          dfi[i] -= 2.0 * c * du;
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!support_[i]) continue;
        double dkl = q_[i] * (u_[i] - kl);
        gr[i] = 2.0 * (dkl * fi - kl * dfi[i]) / (fi * fi);
      }
    }
    return r;
  }

  bool in_support(std::size_t i) const { return support_[i]; }

 private:
  static double sq(double v) { return v * v; }
  bool has_left(std::size_t i, std::size_t k) const {
    return geo_.index_along(i, k) > 0 && support_[i - geo_.stride(k)];
  }
  bool has_right(std::size_t i, std::size_t k) const {
    return geo_.index_along(i, k) + 1 < geo_.axes[k].n && support_[i + geo_.stride(k)];
  }

  const GibbsGrid& mu_;
  const GridGeometry& geo_;
  std::vector<bool> support_;
  std::vector<double> kappa_;
  std::vector<double> q_, u_, g_;
};

}  // namespace

std::vector<double> lsi_ratio_gradient(const TestDensity& nu, const GibbsGrid& mu) {
  require(nu.geometry() == mu.geometry(), "lsi_ratio_gradient: density does not live on the measure's grid");
  RatioObjective obj(mu, nu);
  std::vector<double> theta(nu.log_masses().begin(), nu.log_masses().end());
  std::vector<double> grad;
  obj.evaluate(theta, &grad);
  return grad;
}

ConstantEstimate ls_variational(const GibbsGrid& mu, const TestDensity& init, std::size_t iters, double step) {
  require(std::isfinite(step) && step > 0.0, "ls_variational: step must be > 0");
  require(init.geometry() == mu.geometry(), "ls_variational: init does not live on the measure's grid");
  const double init_ratio = lsi_ratio(init, mu);

  RatioObjective obj(mu, init);
  const std::size_t n = init.size();
  std::vector<double> theta(init.log_masses().begin(), init.log_masses().end());
  for (std::size_t i = 0; i < n; ++i)
    if (!obj.in_support(i)) theta[i] = kNegInf;

  std::vector<double> grad;
  double current = obj.evaluate(theta, &grad);
  std::vector<double> best_theta = theta;
  std::vector<double> best_grad = grad;
  double best = std::max(current, init_ratio);
  double prev = current;
  int decreases = 0;
  int halvings = 0;
  std::size_t it = 0;
  bool exhausted = false;
  for (; it < iters; ++it) {
    double gmax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (obj.in_support(i)) gmax = std::max(gmax, std::abs(grad[i]));
    if (!(gmax > 0.0)) break;
    for (std::size_t i = 0; i < n; ++i)
      if (obj.in_support(i)) theta[i] += step * grad[i] / gmax;
    double r;
    try {
      r = obj.evaluate(theta, &grad);
    } catch (const PreconditionError&) {
      r = kNegInf;
    }
    if (r > best) {
      best = r;
      best_theta = theta;
      best_grad = grad;
    }
    decreases = r < prev ? decreases + 1 : 0;
    prev = r;
    if (decreases >= 2) {
      if (++halvings > 10) {
        exhausted = true;
        break;
      }
      step *= 0.5;
      theta = best_theta;
      grad = best_grad;
      prev = best;
      decreases = 0;
    }
  }

  ConstantEstimate est;
  est.method = Method::variational;
  est.value = best;
  est.lower = best;
  est.upper = kInf;
  est.diagnostics["init_ratio"] = init_ratio;
  est.diagnostics["iterations"] = static_cast<double>(it);
  est.diagnostics["halvings"] = halvings;
  est.diagnostics["final_step"] = step;
  est.diagnostics["exhausted"] = exhausted ? 1.0 : 0.0;
  return est;
}

std::pair<double, double> defective_lsi_constants(const Potential& p, double t, std::optional<double> c_pl) {
  require(std::isfinite(t) && t > 0.0, "defective_lsi_constants: t must be > 0");
  require(p.smoothness.L1 == 0.0, "defective_lsi_constants: requires L1 = 0");
  require(p.minimizer.has_value(), "defective_lsi_constants: needs a unique declared minimizer");
  const double c = c_pl ? *c_pl : require_finite_c_pl(p);
  require(std::isfinite(c) && c > 0.0, "defective_lsi_constants: C_PL must be finite");
  return {t * c, std::max(0.0, c * p.smoothness.L0 - static_cast<double>(p.dim))};
}

double tighten(double C, double D, double C_P) {
  require(C >= 0.0 && D >= 0.0 && C_P >= 0.0, "tighten: inputs must be >= 0");
  return C + 0.5 * D * C_P;
}

double rothaus_tighten(double C, double D, double C_P) {
  require(C >= 0.0 && D >= 0.0 && C_P >= 0.0, "rothaus_tighten: inputs must be >= 0");
  return C + (0.5 * D + 1.0) * C_P;
}

ConstantEstimate ls_upper_bound(const GibbsGrid& mu, std::optional<double> c_pl) {
  auto [C, D] = defective_lsi_constants(mu.potential(), mu.temperature(), c_pl ? c_pl : mu.c_pl_used());
  ConstantEstimate cp = poincare_spectral(mu);
  ConstantEstimate est;
  est.method = Method::tightened;
  est.value = tighten(C, D, cp.value);
  est.upper = est.value;
  est.lower = std::min(cp.value, est.value);
  est.diagnostics["defective_C"] = C;
  est.diagnostics["defective_D"] = D;
  est.diagnostics["poincare"] = cp.value;
  return est;
}

ConstantEstimate ls_upper_bound(PotentialPtr p, double t, double resolution) {
  require(p != nullptr, "ls_upper_bound: null potential");
  return ls_upper_bound(build_gibbs(std::move(p), t, resolution));
}

}  // namespace bfi
