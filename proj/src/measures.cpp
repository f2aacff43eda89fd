#include "bfi/measures.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include "bfi/error.hpp"
#include "bfi/numerics.hpp"
#include "bfi/pl.hpp"

namespace bfi {

using numerics::kNegInf;

std::size_t GridGeometry::size() const {
  std::size_t s = 1;
  for (const auto& a : axes) s *= a.n;
  return s;
}

std::size_t GridGeometry::stride(std::size_t axis) const {
  std::size_t s = 1;
  for (std::size_t k = axis + 1; k < axes.size(); ++k) s *= axes[k].n;
  return s;
}

std::size_t GridGeometry::index_along(std::size_t flat, std::size_t axis) const {
  return (flat / stride(axis)) % axes[axis].n;
}

double GridGeometry::coordinate(std::size_t flat, std::size_t axis) const {
  return axes[axis][index_along(flat, axis)];
}

Point GridGeometry::point(std::size_t flat) const {
  Point x(dim());
  for (std::size_t k = 0; k < dim(); ++k) x[k] = coordinate(flat, k);
  return x;
}

double GridGeometry::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes) v *= a.step;
  return v;
}

bool GridGeometry::on_boundary(std::size_t flat) const {
  for (std::size_t k = 0; k < dim(); ++k) {
    std::size_t i = index_along(flat, k);
    if (i == 0 || i + 1 == axes[k].n) return true;
  }
  return false;
}

double GibbsGrid::Z() const { return std::exp(log_Z_); }

void GibbsGrid::write_csv(std::ostream& os) const {
  auto flags = os.flags();
  auto prec = os.precision();
  os << std::setprecision(12);
  os << (dim() == 1 ? "x,f,weight\n" : "x,y,f,weight\n");
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t k = 0; k < dim(); ++k) os << geometry_.coordinate(i, k) << ',';
    os << f_values_[i] << ',' << weights_[i] << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

double auto_radius(const Potential& p, double t, std::optional<double> c_pl) {
  if (c_pl && std::isfinite(*c_pl)) {
    double d = static_cast<double>(p.dim);
    return std::max(6.0 * std::sqrt(*c_pl * t) * (std::sqrt(d) + 4.0), 4.0);
  }
  double half = 0.0;
  for (std::size_t k = 0; k < p.dim; ++k) half = std::max(half, 0.5 * (p.domain.hi[k] - p.domain.lo[k]));
  return half;
}

namespace {

double envelope_mass(std::size_t dim, double c_pl, double t, double radius) {
  double s2 = c_pl * t;
  if (dim == 1) return std::sqrt(2.0 * std::numbers::pi * s2) * std::erfc(radius / std::sqrt(2.0 * s2));
  return 2.0 * std::numbers::pi * s2 * std::exp(-radius * radius / (2.0 * s2));
}

}  // namespace

GibbsGrid build_gibbs_on(PotentialPtr p, double t, GridGeometry geometry, std::optional<double> c_pl_hint) {
  require(p != nullptr, "build_gibbs: null potential");
  require(std::isfinite(t) && t > 0.0, "build_gibbs: temperature must be > 0");
  require(geometry.dim() == p->dim, "build_gibbs: geometry dimension mismatch");
  require(p->dim <= 2, "build_gibbs: only 1D and 2D grids are supported");
  for (const auto& a : geometry.axes) require(a.n >= 3 && a.step > 0.0, "build_gibbs: degenerate axis");

  GibbsGrid mu;
  mu.potential_ = p;
  mu.t_ = t;
  mu.geometry_ = std::move(geometry);
  const auto& geo = mu.geometry_;
  const std::size_t n = geo.size();
  const std::size_t d = geo.dim();

  mu.c_pl_ = c_pl_hint ? c_pl_hint : resolve_c_pl(*p);
  mu.center_.resize(d);
  mu.radius_ = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    mu.center_[k] = 0.5 * (geo.axes[k].lo + geo.axes[k].hi());
    mu.radius_ = std::max(mu.radius_, 0.5 * (geo.axes[k].hi() - geo.axes[k].lo));
  }
  if (d == 1) {
    mu.points_.resize(n);
    for (std::size_t i = 0; i < n; ++i) mu.points_[i] = geo.axes[0][i];
  }

  mu.f_values_.resize(n);
  std::vector<double> log_density(n);  // −f/t + log(trapezoid coefficient)
  double f_ref = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    Point x = geo.point(i);
    double fx = p->f(x);
    if (!std::isfinite(fx)) throw NumericalError("build_gibbs: non-finite potential value");
    mu.f_values_[i] = fx;
    f_ref = std::min(f_ref, fx);
  }
  const double log_cell = std::log(geo.cell_volume());
  for (std::size_t i = 0; i < n; ++i) {
    double coeff = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      std::size_t j = geo.index_along(i, k);
      if (j == 0 || j + 1 == geo.axes[k].n) coeff += std::log(0.5);
    }
    log_density[i] = -(mu.f_values_[i] - f_ref) / t + coeff;
  }
  const double log_sum = numerics::log_sum_exp(log_density);
  mu.log_Z_ = -f_ref / t + log_sum + log_cell;
  mu.log_weights_.resize(n);
  mu.weights_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mu.log_weights_[i] = log_density[i] - log_sum;
    mu.weights_[i] = std::exp(mu.log_weights_[i]);
  }

  // Boundary decay: the Gibbs density on the boundary must be negligible
  // compared with its peak.
  double boundary_peak = kNegInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (geo.on_boundary(i)) boundary_peak = std::max(boundary_peak, -(mu.f_values_[i] - f_ref) / t);
  }
  if (boundary_peak > std::log(1e-12)) {
    throw NumericalError("build_gibbs: weights fail to decay at the grid boundary (relative density " +
                         std::to_string(std::exp(boundary_peak)) +
                         "); PL or unique-minimizer hypothesis violated, or radius too small");
  }

  // Edge masses at midpoints, normalized like the node weights.
  mu.edge_log_weights_.assign(d, std::vector<double>(n, kNegInf));
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (geo.index_along(i, k) + 1 >= geo.axes[k].n) continue;
      Point x = geo.point(i);
      x[k] += 0.5 * geo.axes[k].step;
      double coeff = 0.0;
      for (std::size_t m = 0; m < d; ++m) {
        if (m == k) continue;
        std::size_t j = geo.index_along(i, m);
        if (j == 0 || j + 1 == geo.axes[m].n) coeff += std::log(0.5);
      }
      double fm = p->f(x);
      mu.edge_log_weights_[k][i] = -(fm - f_ref) / t + coeff - log_sum;
    }
  }

  if (mu.c_pl_ && std::isfinite(*mu.c_pl_)) {
    double f_star = p->f_star.value_or(f_ref);
    double log_z_shift = mu.log_Z_ + f_star / t;
    double inner = mu.radius_;
    for (std::size_t k = 0; k < d; ++k) {
      double c = p->minimizer ? (*p->minimizer)[k] : mu.center_[k];
      inner = std::min({inner, c - geo.axes[k].lo, geo.axes[k].hi() - c});
    }
    mu.tail_envelope_ = envelope_mass(d, *mu.c_pl_, t, std::max(inner, 0.0)) * std::exp(-log_z_shift);
  } else {
    mu.tail_envelope_ = std::numeric_limits<double>::quiet_NaN();
  }
  return mu;
}

GibbsGrid build_gibbs(PotentialPtr p, double t, double resolution, RadiusPolicy policy,
                      std::optional<double> c_pl_hint) {
  require(p != nullptr, "build_gibbs: null potential");
  require(std::isfinite(t) && t > 0.0, "build_gibbs: temperature must be > 0");
  require(std::isfinite(resolution) && resolution > 0.0, "build_gibbs: resolution must be > 0");
  std::optional<double> c_pl = c_pl_hint ? c_pl_hint : resolve_c_pl(*p);
  double radius = policy.kind == RadiusPolicy::Kind::fixed ? policy.radius : auto_radius(*p, t, c_pl);
  require(std::isfinite(radius) && radius > 0.0, "build_gibbs: radius must be > 0");

  Point center(p->dim, 0.0);
  if (p->minimizer) {
    center = *p->minimizer;
  } else {
    for (std::size_t k = 0; k < p->dim; ++k) center[k] = 0.5 * (p->domain.lo[k] + p->domain.hi[k]);
  }
  GridGeometry geo;
  const auto intervals = static_cast<std::size_t>(std::llround(2.0 * radius * resolution));
  require(intervals >= 2, "build_gibbs: resolution too low for the truncation radius");
  for (std::size_t k = 0; k < p->dim; ++k) {
    geo.axes.push_back(Axis{center[k] - radius, 2.0 * radius / static_cast<double>(intervals), intervals + 1});
  }
  GibbsGrid mu = build_gibbs_on(std::move(p), t, std::move(geo), c_pl);
  mu.center_ = center;
  mu.radius_ = radius;
  return mu;
}

// ---------------------------------------------------------------------------

TestDensity::TestDensity(GridGeometry geometry, std::vector<double> log_masses, bool clear_boundary)
    : geometry_(std::move(geometry)), log_masses_(std::move(log_masses)) {
  require(log_masses_.size() == geometry_.size(), "TestDensity: size mismatch");
  if (clear_boundary) {
    for (std::size_t i = 0; i < log_masses_.size(); ++i)
      if (geometry_.on_boundary(i)) log_masses_[i] = kNegInf;
  }
  for (double v : log_masses_) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
      throw NumericalError("TestDensity: invalid log-mass");
  }
  double total = numerics::log_sum_exp(log_masses_);
  if (!std::isfinite(total)) throw PreconditionError("TestDensity: density has no mass");
  masses_.resize(log_masses_.size());
  for (std::size_t i = 0; i < log_masses_.size(); ++i) {
    log_masses_[i] -= total;
    masses_[i] = std::exp(log_masses_[i]);
  }
}

TestDensity TestDensity::from_neg_log_density(const GibbsGrid& mu, const LogDensity& g) {
  std::vector<double> lm(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) lm[i] = -g(mu.geometry().point(i));
  return TestDensity(mu.geometry(), std::move(lm), true);
}

TestDensity TestDensity::gaussian(const GibbsGrid& mu, std::span<const double> mean, double sigma) {
  require(mean.size() == mu.dim(), "TestDensity::gaussian: mean dimension mismatch");
  require(std::isfinite(sigma) && sigma > 0.0, "TestDensity::gaussian: sigma must be > 0");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const auto& geo = mu.geometry();
  std::vector<double> lm(mu.size());
  if (geo.dim() == 1) {
    for (std::size_t i = 0; i < lm.size(); ++i) {
      double z = geo.axes[0][i] - mean[0];
      lm[i] = -z * z * inv;
    }
  } else {
    for (std::size_t i = 0; i < lm.size(); ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < geo.dim(); ++k) {
        double z = geo.coordinate(i, k) - mean[k];
        s += z * z;
      }
      lm[i] = -s * inv;
    }
  }
  return TestDensity(geo, std::move(lm), true);
}

TestDensity TestDensity::gaussian(const GibbsGrid& mu, double mean, double sigma) {
  double m[1] = {mean};
  return gaussian(mu, std::span<const double>(m, 1), sigma);
}

TestDensity TestDensity::from_log_masses(const GibbsGrid& mu, std::vector<double> log_masses) {
  return TestDensity(mu.geometry(), std::move(log_masses), true);
}

TestDensity TestDensity::matching(const GibbsGrid& mu) {
  std::vector<double> lm(mu.log_weights().begin(), mu.log_weights().end());
  return TestDensity(mu.geometry(), std::move(lm), false);
}

double TestDensity::neg_log_density(std::size_t i) const {
  return -(log_masses_[i] - std::log(geometry_.cell_volume()));
}

// ---------------------------------------------------------------------------

namespace {

void check_compatible(const TestDensity& nu, const GibbsGrid& mu, const char* op) {
  if (!(nu.geometry() == mu.geometry()))
    throw PreconditionError(std::string(op) + ": test density does not live on the measure's grid");
  const auto lw = mu.log_weights();
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu.in_support(i) && lw[i] == kNegInf)
      throw PreconditionError(std::string(op) + ": support violation (nu not absolutely continuous wrt mu)");
  }
}

}  // namespace

double kl_divergence(const TestDensity& nu, const GibbsGrid& mu) {
  check_compatible(nu, mu, "kl_divergence");
  const auto lq = nu.log_masses();
  const auto q = nu.masses();
  const auto lw = mu.log_weights();
  double kl = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (q[i] > 0.0) kl += q[i] * (lq[i] - lw[i]);
  }
  if (!std::isfinite(kl)) throw NumericalError("kl_divergence: non-finite value");
  return std::max(kl, 0.0);
}

double fisher_information(const TestDensity& nu, const GibbsGrid& mu) {
  check_compatible(nu, mu, "fisher_information");
  const auto& geo = mu.geometry();
  const auto lq = nu.log_masses();
  const auto q = nu.masses();
  const auto lw = mu.log_weights();
  double fi = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (!(q[i] > 0.0)) continue;
    const double ui = lq[i] - lw[i];
    double node = 0.0;
    for (std::size_t k = 0; k < geo.dim(); ++k) {
      const std::size_t stride = geo.stride(k);
      const std::size_t pos = geo.index_along(i, k);
      const double h = geo.axes[k].step;
      double sum = 0.0;
      int count = 0;
      if (pos > 0 && q[i - stride] > 0.0) {
        double du = (lq[i - stride] - lw[i - stride] - ui) / h;
        sum += du * du;
        ++count;
      }
      if (pos + 1 < geo.axes[k].n && q[i + stride] > 0.0) {
        double du = (lq[i + stride] - lw[i + stride] - ui) / h;
        sum += du * du;
        ++count;
      }
      if (count > 0) node += sum / count;
    }
    fi += q[i] * node;
  }
  if (!std::isfinite(fi)) throw NumericalError("fisher_information: non-finite log-ratio gradient");
  return fi;
}

RescaledMoments rescaled_moments(const GibbsGrid& mu) {
  const auto& p = mu.potential();
  require(p.minimizer.has_value(), "rescaled_moments: potential has no declared minimizer");
  const auto& geo = mu.geometry();
  const auto w = mu.weights();
  const double scale = 1.0 / std::sqrt(mu.temperature());
  RescaledMoments m{Point(mu.dim(), 0.0), Point(mu.dim(), 0.0)};
  for (std::size_t k = 0; k < mu.dim(); ++k) {
    const double xs = (*p.minimizer)[k];
    double m1 = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) m1 += w[i] * (geo.coordinate(i, k) - xs) * scale;
    double m2 = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      double z = (geo.coordinate(i, k) - xs) * scale - m1;
      m2 += w[i] * z * z;
    }
    m.mean_z[k] = m1;
    m.var_z[k] = m2;
  }
  return m;
}

double laplace_gap(const GibbsGrid& mu) {
  const auto& p = mu.potential();
  require(p.minimizer.has_value(), "laplace_gap: potential has no declared minimizer");
  const Point& xs = *p.minimizer;
  double H[4] = {0, 0, 0, 0};
  p.hess(xs, std::span<double>(H, p.dim * p.dim));
  double det = p.dim == 1 ? H[0] : H[0] * H[3] - 0.25 * (H[1] + H[2]) * (H[1] + H[2]);
  double lmin = p.hessian_lambda_min(xs);
  if (!(lmin > 0.0) || !(det > 0.0))
    throw PreconditionError("laplace_gap: Hessian at the minimizer is singular or indefinite");
  const double t = mu.temperature();
  const double d = static_cast<double>(p.dim);
  const double log_z_shift = mu.log_Z() + p.f(xs) / t;
  // det(2π t H^{-1}) = (2π t)^d / det H
  return log_z_shift - 0.5 * (d * std::log(2.0 * std::numbers::pi * t) - std::log(det));
}

double laplace_gap(PotentialPtr p, double t, double resolution) {
  require(p != nullptr, "laplace_gap: null potential");
  require(p->minimizer.has_value(), "laplace_gap: potential has no declared minimizer");
  return laplace_gap(build_gibbs(std::move(p), t, resolution));
}

}  // namespace bfi
