#include "bfi/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bfi/error.hpp"
#include "bfi/numerics.hpp"
#include "bfi/pl.hpp"
#include "bfi/tridiagonal.hpp"

namespace bfi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using numerics::kNegInf;

struct SpectralSolve {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double rayleigh_lower = 0.0;  // Rayleigh bound of the coordinate function
  std::size_t nodes = 0;
};

SpectralSolve solve_1d(const GibbsGrid& mu) {
  const std::size_t n = mu.size();
  require(n >= 3, "poincare_spectral: grid needs at least three nodes");
  const auto lw = mu.log_weights();
  const auto lm = mu.edge_log_weights(0);
  const double h2 = mu.spacing() * mu.spacing();

  double boundary = mu.weights()[0] + mu.weights()[n - 1];
  if (boundary > kTailThreshold)
    throw NumericalError("poincare_spectral: boundary mass " + std::to_string(boundary) +
                         " above the tail threshold");

  SymTridiagonal a;
  a.diag.assign(n, 0.0);
  a.off.assign(n - 1, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    a.diag[i] += std::exp(lm[i] - lw[i]) / h2;
    a.diag[i + 1] += std::exp(lm[i] - lw[i + 1]) / h2;
    a.off[i] = -std::exp(lm[i] - 0.5 * (lw[i] + lw[i + 1])) / h2;
  }
  SpectralSolve out;
  out.nodes = n;
  out.lambda1 = a.eigenvalue(1);
  out.lambda2 = a.eigenvalue(2);
  if (!(out.lambda1 > 0.0) || !std::isfinite(out.lambda1))
    throw NumericalError("poincare_spectral: non-positive spectral gap");
  if (out.lambda2 - out.lambda1 <= 1e-9 * out.lambda2)
    throw NumericalError("poincare_spectral: grid too coarse (lambda_1 indistinguishable from lambda_2)");

  const auto x = mu.points();
  const auto w = mu.weights();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += w[i] * x[i];
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += w[i] * (x[i] - mean) * (x[i] - mean);
  double edge_mass = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) edge_mass += std::exp(lm[i]);
  out.rayleigh_lower = var / edge_mass;
  if (out.rayleigh_lower > (1.0 + 1e-9) / out.lambda1)
    throw NumericalError("poincare_spectral: eigenvalue inconsistent with the Rayleigh bound");
  return out;
}

}  // namespace

ConstantEstimate poincare_spectral(const GibbsGrid& mu) {
  ConstantEstimate est;
  est.method = Method::spectral;
  std::vector<SpectralSolve> solves;
  if (mu.dim() == 1) {
    solves.push_back(solve_1d(mu));
  } else {
    const Potential& p = mu.potential();
    require(p.separable() && p.components.size() == mu.dim(),
            "poincare_spectral: 2D grids need a separable potential");
    for (std::size_t k = 0; k < mu.dim(); ++k) {
      GibbsGrid factor = build_gibbs_on(p.components[k], mu.temperature(), GridGeometry{{mu.geometry().axes[k]}});
      solves.push_back(solve_1d(factor));
    }
  }
  double lambda1 = kInf, lambda2 = kInf, lower = 0.0;
  std::size_t nodes = 1;
  for (const auto& s : solves) {
    if (s.lambda1 < lambda1) {
      lambda2 = std::min(s.lambda2, lambda1);
      lambda1 = s.lambda1;
    } else {
      lambda2 = std::min(lambda2, s.lambda1);
    }
    lower = std::max(lower, s.rayleigh_lower);
    nodes *= s.nodes;
  }
  est.value = 1.0 / lambda1;
  est.lower = std::min(lower, est.value);
  est.upper = kInf;
  est.diagnostics["lambda1"] = lambda1;
  est.diagnostics["lambda2"] = lambda2;
  est.diagnostics["nodes"] = static_cast<double>(nodes);
  return est;
}

MuckenhouptBracket muckenhoupt_bracket(const GibbsGrid& mu) {
  require(mu.dim() == 1, "muckenhoupt_bracket: 1D grids only");
  const std::size_t n = mu.size();
  require(n >= 3, "muckenhoupt_bracket: grid needs at least three nodes");
  const auto w = mu.weights();
  const auto lw = mu.log_weights();
  const auto lm = mu.edge_log_weights(0);
  const double log_h2 = 2.0 * std::log(mu.spacing());

  std::size_t m = 0;
  double acc = 0.0;
  for (; m < n; ++m) {
    acc += w[m];
    if (acc >= 0.5) break;
  }
  require(m > 0 && m + 1 < n, "muckenhoupt_bracket: median not interior");

  const double log_threshold = std::log(kTailThreshold);
  double best = kNegInf;
  // Right side: tail mass of nodes ≥ k times Σ Δx²/m_e over edges in (m, k].
  std::vector<double> tail(n, kNegInf);
  tail[n - 1] = lw[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) tail[k] = numerics::log_add_exp(tail[k + 1], lw[k]);
  double log_int = kNegInf;
  for (std::size_t k = m + 1; k < n; ++k) {
    if (tail[k] < log_threshold) break;
    log_int = numerics::log_add_exp(log_int, log_h2 - lm[k - 1]);
    best = std::max(best, tail[k] + log_int);
  }
  std::vector<double> head(n, kNegInf);
  head[0] = lw[0];
  for (std::size_t k = 1; k < n; ++k) head[k] = numerics::log_add_exp(head[k - 1], lw[k]);
  log_int = kNegInf;
  for (std::size_t k = m; k-- > 0;) {
    if (head[k] < log_threshold) break;
    log_int = numerics::log_add_exp(log_int, log_h2 - lm[k]);
    best = std::max(best, head[k] + log_int);
  }
  if (!std::isfinite(best)) throw NumericalError("muckenhoupt_bracket: density underflow");
  double b = std::exp(best);
  return {b, 4.0 * b, mu.points()[m]};
}

LyapunovParams LyapunovParams::make(double c_pl, double L0, double L1, double alpha, double r0, double k,
                                    double t) {
  LyapunovParams lp;
  lp.c_pl = c_pl;
  lp.L0 = L0;
  lp.L1 = L1;
  lp.alpha = alpha;
  lp.r0 = r0;
  lp.delta = r0 * r0 / (2.0 * c_pl);
  lp.k = k;
  lp.t = t;
  return lp;
}

double LyapunovParams::t0() const {
  double denom = c_pl * L0 + 2.0 * delta * L1 + 2.0 * k - 2.0;
  return denom > 0.0 ? 2.0 * delta / denom : kInf;
}

void LyapunovParams::validate() const {
  require(std::isfinite(c_pl) && c_pl > 0.0, "LyapunovParams: C_PL must be finite and > 0");
  require(L0 >= 0.0 && L1 >= 0.0, "LyapunovParams: L0, L1 must be >= 0");
  require(alpha > 0.0 && r0 > 0.0, "LyapunovParams: alpha and r0 must be > 0");
  require(k >= 1.0, "LyapunovParams: k must be >= 1");
  require(t > 0.0, "LyapunovParams: t must be > 0");
  double expected = r0 * r0 / (2.0 * c_pl);
  require(std::abs(delta - expected) <= 1e-12 * expected, "LyapunovParams: delta must equal r0^2/(2 C_PL)");
  require(t < t0(), "LyapunovParams: t must be below t0 = " + std::to_string(t0()));
}

double lyapunov_bound_formula(const LyapunovParams& lp) {
  lp.validate();
  const double c = lp.c_pl, t = lp.t, d = lp.delta, k = lp.k;
  double first_den = 1.0 - lp.L1 * t - (k - 1.0) * t / d - c * lp.L0 * t / (2.0 * d);
  double second_den = d - d * lp.L1 * t - (k - 1.0) * t - c * lp.L0 * t / 2.0;
  if (!(first_den > 0.0) || !(second_den > 0.0))
    throw PreconditionError("lyapunov_bound_formula: t >= t0 (denominator nonpositive)");
  return (c * t / k) / first_den + (1.0 + c * lp.L0 * t / second_den) * t / lp.alpha;
}

double local_convexity(const Potential& p, double r0, std::size_t probes_per_axis) {
  require(p.minimizer.has_value(), "local_convexity: needs a declared minimizer");
  require(r0 > 0.0 && probes_per_axis >= 2, "local_convexity: invalid radius or probe count");
  const Point& xs = *p.minimizer;
  double lmin = kInf;
  if (p.dim == 1) {
    for (std::size_t i = 0; i < probes_per_axis; ++i) {
      double x = xs[0] - r0 + 2.0 * r0 * static_cast<double>(i) / static_cast<double>(probes_per_axis - 1);
      lmin = std::min(lmin, p.second_derivative(x));
    }
    return lmin;
  }
  const std::size_t n = std::min<std::size_t>(probes_per_axis, 101);
  Point x(2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double u = -r0 + 2.0 * r0 * static_cast<double>(i) / static_cast<double>(n - 1);
      double v = -r0 + 2.0 * r0 * static_cast<double>(j) / static_cast<double>(n - 1);
      if (u * u + v * v > r0 * r0 * (1.0 + 1e-12)) continue;
      x[0] = xs[0] + u;
      x[1] = xs[1] + v;
      lmin = std::min(lmin, p.hessian_lambda_min(x));
    }
  }
  return lmin;
}

namespace {
constexpr int kLadderLo = -6;
constexpr int kLadderHi = 3;
}  // namespace

std::optional<LyapunovParams> select_lyapunov_params(const Potential& p, double t, double k,
                                                     std::optional<double> c_pl) {
  const double c = c_pl ? *c_pl : require_finite_c_pl(p);
  std::optional<LyapunovParams> best;
  double best_bound = kInf;
  for (int j = kLadderLo; j <= kLadderHi; ++j) {
    double r0 = std::ldexp(1.0, j);
    double alpha = local_convexity(p, r0);
    if (!(alpha > 0.0)) continue;
    LyapunovParams lp = LyapunovParams::make(c, p.smoothness.L0, p.smoothness.L1, alpha, r0, k, t);
    if (!(t < lp.t0())) continue;
    double bound = lyapunov_bound_formula(lp);
    if (bound < best_bound) {
      best_bound = bound;
      best = lp;
    }
  }
  return best;
}

std::optional<double> largest_radius_for(const Potential& p, double alpha) {
  std::optional<double> out;
  for (int j = kLadderLo; j <= kLadderHi; ++j) {
    double r0 = std::ldexp(1.0, j);
    if (local_convexity(p, r0) >= alpha) out = r0;
  }
  return out;
}

LyapunovCheck lyapunov_criterion_verify(const GibbsGrid& mu, const LyapunovParams& lp, double lambda_scale) {
  lp.validate();
  const Potential& p = mu.potential();
  require(p.minimizer.has_value(), "lyapunov_criterion_verify: needs a declared minimizer");
  require(std::abs(mu.temperature() - lp.t) <= 1e-12 * lp.t,
          "lyapunov_criterion_verify: grid temperature differs from params.t");
  require(local_convexity(p, lp.r0) >= lp.alpha - 1e-12,
          "lyapunov_criterion_verify: alpha exceeds the Hessian floor on B(x*, r0)");
  const double f_star = p.f_star.value_or(p.f(*p.minimizer));
  const double c = lp.c_pl, t = lp.t, d = lp.delta, k = lp.k;

  LyapunovCheck out;
  out.lambda = ((1.0 / t - lp.L1 - (k - 1.0) / d) * k / c - k * lp.L0 / (2.0 * d)) * lambda_scale;
  const double lambda0 = out.lambda / lambda_scale;
  out.b = 1.0 + k * lp.L0 / (d * lambda0);
  out.min_margin = kInf;

  const auto& geo = mu.geometry();
  const Point& xs = *p.minimizer;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    Point x = geo.point(i);
    double fs = p.f(x) - f_star + d;
    double g2 = p.grad_norm_sq(x);
    double lap = p.laplacian(x);
    double v = (k / t - k * (k - 1.0) / fs) * g2 / fs - k * lap / fs;
    double r2 = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) r2 += (x[m] - xs[m]) * (x[m] - xs[m]);
    bool in_k = r2 <= lp.r0 * lp.r0;
    double margin = v - out.lambda * (1.0 - (in_k ? out.b : 0.0));
    if (margin < out.min_margin) {
      out.min_margin = margin;
      out.witness = x;
      out.witness_index = i;
    }
  }
  return out;
}

}  // namespace bfi
