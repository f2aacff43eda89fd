#include "bfi/pl.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "bfi/dynamics.hpp"
#include "bfi/error.hpp"
#include "bfi/numerics.hpp"

namespace bfi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGradFloor = 1e-9;
constexpr double kGapFloor = 1e-12;

struct RatioSample {
  double r = -kInf;  // −∞ marks the excluded zone around the minimizer
  double gap = 0.0;
};

RatioSample pl_ratio(const Potential& p, std::span<const double> x, double f_star) {
  double gap = p.f(x) - f_star;
  double g2 = p.grad_norm_sq(x);
  if (!std::isfinite(gap) || !std::isfinite(g2)) throw NumericalError("pl_constant_static: non-finite evaluation");
  if (g2 < kGradFloor * kGradFloor && gap < kGapFloor) return {-kInf, gap};
  if (g2 == 0.0) return {gap > 0.0 ? kInf : -kInf, gap};
  return {2.0 * std::max(gap, 0.0) / g2, gap};
}

std::size_t intervals_for(double length, double resolution) {
  auto n = static_cast<std::size_t>(std::llround(length * resolution));
  return std::max<std::size_t>(n, 2);
}

double bracket_f_star(const Potential& p, const Box& domain, double resolution) {
  if (p.f_star) return *p.f_star;
  if (p.minimizer) return p.f(*p.minimizer);
  require(p.dim == 1, p.name + ": f* unknown; minimizer bracketing is implemented in 1D");
  const double lo = domain.lo[0], hi = domain.hi[0];
  const std::size_t n = intervals_for(hi - lo, resolution);
  const double h = (hi - lo) / static_cast<double>(n);
  std::size_t best = 0;
  double fbest = kInf;
  for (std::size_t i = 0; i <= n; ++i) {
    double v = p.value(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  if (best == 0 || best == n) throw PreconditionError(p.name + ": f* unknown and minimizer unbracketable on the domain");
  double x0 = lo + (hi - lo) * static_cast<double>(best) / static_cast<double>(n);
  auto m = numerics::golden_section_max([&](double x) { return -p.value(x); }, x0 - h, x0 + h, 1e-12);
  return std::min(fbest, -m.value);
}

}  // namespace

ConstantEstimate pl_constant_static(const Potential& p, const Box& domain, double resolution) {
  require(std::isfinite(resolution) && resolution > 0.0, "pl_constant_static: resolution must be > 0");
  require(domain.lo.size() == p.dim && domain.hi.size() == p.dim, "pl_constant_static: domain dimension mismatch");
  require(p.dim <= 2, "pl_constant_static: only d <= 2 is supported");
  const double f_star = bracket_f_star(p, domain, resolution);
  if (p.minimizer) require(domain.contains(*p.minimizer), "pl_constant_static: domain must contain the minimizer");

  std::array<std::size_t, 2> n{0, 0};
  for (std::size_t k = 0; k < p.dim; ++k) n[k] = intervals_for(domain.hi[k] - domain.lo[k], resolution);
  auto coord = [&](std::size_t k, std::size_t i) {
    return domain.lo[k] + (domain.hi[k] - domain.lo[k]) * static_cast<double>(i) / static_cast<double>(n[k]);
  };

  ConstantEstimate est;
  est.method = Method::refined;
  double best = -kInf;
  Point argmax(p.dim, 0.0);
  std::array<std::size_t, 2> best_idx{0, 0};
  double worst_divergent = -kInf;
  Point witness;
  std::size_t evaluated = 0;

  Point x(p.dim);
  const std::size_t ny = p.dim == 2 ? n[1] + 1 : 1;
  for (std::size_t i = 0; i <= n[0]; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      x[0] = coord(0, i);
      if (p.dim == 2) x[1] = coord(1, j);
      RatioSample s = pl_ratio(p, x, f_star);
      ++evaluated;
      if (s.r > kPlDivergenceThreshold && s.gap > 1e-6 && s.r > worst_divergent) {
        worst_divergent = s.r;
        witness = x;
      }
      if (s.r > best) {
        best = s.r;
        argmax = x;
        best_idx = {i, j};
      }
    }
  }
  est.diagnostics["resolution"] = resolution;
  est.diagnostics["grid_points"] = static_cast<double>(evaluated);
  est.diagnostics["f_star"] = f_star;

  if (!witness.empty()) {
    est.divergent = true;
    est.value = kInf;
    est.lower = std::isfinite(worst_divergent) ? worst_divergent : kPlDivergenceThreshold;
    est.upper = kInf;
    est.diagnostics["witness"] = witness[0];
    if (p.dim == 2) est.diagnostics["witness_y"] = witness[1];
    est.diagnostics["argmax"] = witness[0];
    return est;
  }
  if (!(best > -kInf)) throw NumericalError("pl_constant_static: every probe fell inside the excluded zone");

  // Golden-section refinement inside the neighbouring cells of the grid argmax.
  auto refine_axis = [&](std::size_t k, std::size_t idx) {
    double lo = coord(k, idx > 0 ? idx - 1 : 0);
    double hi = coord(k, std::min(idx + 1, n[k]));
    Point y = argmax;
    auto m = numerics::golden_section_max(
        [&](double v) {
          y[k] = v;
          return pl_ratio(p, y, f_star).r;
        },
        lo, hi, 1e-13 * std::max(1.0, std::abs(hi)));
    if (m.value > best) {
      best = m.value;
      argmax[k] = m.x;
    }
    return m.evaluations;
  };
  int evals = 0;
  const int rounds = p.dim == 1 ? 1 : 4;
  for (int round = 0; round < rounds; ++round) {
    for (std::size_t k = 0; k < p.dim; ++k) evals += refine_axis(k, best_idx[k]);
  }
  est.value = best;
  est.lower = best;
  est.upper = p.analytic.c_pl ? std::max(best, *p.analytic.c_pl) : kInf;
  est.diagnostics["argmax"] = argmax[0];
  if (p.dim == 2) est.diagnostics["argmax_y"] = argmax[1];
  est.diagnostics["iterations"] = evals;
  return est;
}

ConstantEstimate pl_constant_static(const Potential& p, double resolution) {
  return pl_constant_static(p, p.domain, resolution);
}

ConstantEstimate pl_constant_dynamic(const Potential& p, const std::vector<Point>& initializations, double horizon,
                                     double step) {
  require(!initializations.empty(), "pl_constant_dynamic: no initializations");
  const double f_star = p.f_star ? *p.f_star : (p.minimizer ? p.f(*p.minimizer) : kInf);
  require(std::isfinite(f_star), "pl_constant_dynamic: needs a declared f* or minimizer");
  const double floor = 1e-14 * std::max(1.0, std::abs(f_star));

  ConstantEstimate est;
  est.method = Method::dynamic;
  double best = -kInf;
  std::size_t valid = 0;
  for (std::size_t i = 0; i < initializations.size(); ++i) {
    const Point& x0 = initializations[i];
    const double gap0 = p.f(x0) - f_star;
    require(gap0 > floor, "pl_constant_dynamic: f(x0) must exceed f* for every initialization");
    TrajectoryRecord rec = gradient_flow_run(p, x0, horizon, step);
    for (std::size_t k = 1; k < rec.times.size(); ++k) {
      double gap = rec.objective_gaps[k];
      if (!(gap > floor) || !(gap < gap0)) continue;
      double c = 2.0 * rec.times[k] / std::log(gap0 / gap);
      ++valid;
      if (c > best) {
        best = c;
        est.diagnostics["witness_init"] = x0[0];
        est.diagnostics["witness_time"] = rec.times[k];
      }
    }
  }
  if (valid == 0)
    throw NumericalError("pl_constant_dynamic: objective gap underflowed before any valid sample (horizon too long)");
  est.value = best;
  est.lower = best;
  est.upper = kInf;
  est.diagnostics["samples"] = static_cast<double>(valid);
  est.diagnostics["horizon"] = horizon;
  est.diagnostics["step"] = step;
  return est;
}

GrowthMargin quadratic_growth_margin(const Potential& p, double c_pl, const std::vector<Point>& probes) {
  require(p.minimizer.has_value(), "quadratic_growth_margin: needs a declared minimizer");
  require(std::isfinite(c_pl) && c_pl > 0.0, "quadratic_growth_margin: C_PL must be finite and > 0");
  require(!probes.empty(), "quadratic_growth_margin: no probes");
  const Point& xs = *p.minimizer;
  const double f_star = p.f_star.value_or(p.f(xs));
  GrowthMargin out{kInf, {}};
  for (const auto& x : probes) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < p.dim; ++k) d2 += (x[k] - xs[k]) * (x[k] - xs[k]);
    double m = (p.f(x) - f_star) - d2 / (2.0 * c_pl);
    if (m < out.margin) {
      out.margin = m;
      out.witness = x;
    }
  }
  return out;
}

HessianFloor hessian_floor_check(const Potential& p, double c_pl) {
  require(p.minimizer.has_value(), "hessian_floor_check: minimizer missing");
  require(c_pl > 0.0, "hessian_floor_check: C_PL must be > 0");
  double lmin = p.hessian_lambda_min(*p.minimizer);
  return {lmin, lmin >= 1.0 / c_pl - 1e-9};
}

std::optional<double> resolve_c_pl(const Potential& p, double resolution) {
  if (p.analytic.pl_divergent) return std::nullopt;
  if (p.analytic.c_pl) return p.analytic.c_pl;
  ConstantEstimate est = pl_constant_static(p, p.dim == 1 ? resolution : std::min(resolution, 25.0));
  if (est.divergent) return std::nullopt;
  return est.value;
}

double require_finite_c_pl(const Potential& p, double resolution) {
  if (p.analytic.pl_divergent) throw PreconditionError("PL constant divergent for " + p.name);
  if (p.analytic.c_pl) return *p.analytic.c_pl;
  ConstantEstimate est = pl_constant_static(p, p.dim == 1 ? resolution : std::min(resolution, 50.0));
  if (est.divergent) throw PreconditionError("PL constant divergent for " + p.name);
  return est.value;
}

}  // namespace bfi
