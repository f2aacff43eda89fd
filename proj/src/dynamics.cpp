#include "bfi/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "bfi/error.hpp"
#include "bfi/numerics.hpp"
#include "bfi/pl.hpp"

namespace bfi {

namespace {

double resolve_f_star(const Potential& p) {
  if (p.f_star) return *p.f_star;
  if (p.minimizer) return p.f(*p.minimizer);
  throw PreconditionError(p.name + ": gradient flow gaps need a declared f* or minimizer");
}

std::mt19937_64 particle_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Point grid_center(const Potential& p) {
  if (p.minimizer) return *p.minimizer;
  Point c(p.dim);
  for (std::size_t k = 0; k < p.dim; ++k) c[k] = 0.5 * (p.domain.lo[k] + p.domain.hi[k]);
  return c;
}

/// Inverse-CDF sampler over grid nodes with uniform jitter inside the cell.
class StationarySampler {
 public:
  explicit StationarySampler(const GibbsGrid& mu) : geo_(mu.geometry()) {
    cdf_.resize(mu.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      acc += mu.weights()[i];
      cdf_[i] = acc;
    }
  }

  template <class Rng>
  void draw(Rng& rng, std::span<double> out) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double target = u(rng) * cdf_.back();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), target);
    std::size_t flat = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
    for (std::size_t k = 0; k < geo_.dim(); ++k)
      out[k] = geo_.coordinate(flat, k) + (u(rng) - 0.5) * geo_.axes[k].step;
  }

 private:
  GridGeometry geo_;
  std::vector<double> cdf_;
};

struct LangevinStepper {
  const Potential& p;
  double t;
  double dt;
  double noise;  // sqrt(2 t dt)

  template <class Rng>
  void advance(std::span<double> x, std::size_t steps, Rng& rng, std::normal_distribution<double>& normal) const {
    std::array<double, 2> g{};
    const std::size_t d = p.dim;
    for (std::size_t s = 0; s < steps; ++s) {
      p.grad(x, std::span<double>(g.data(), d));
      for (std::size_t k = 0; k < d; ++k) {
        x[k] -= g[k] * dt;
        if (t > 0.0) x[k] += noise * normal(rng);
      }
    }
    for (std::size_t k = 0; k < d; ++k)
      if (!std::isfinite(x[k])) throw NumericalError("langevin_run: particle state became non-finite");
  }
};

void check_langevin_step(const Potential& p, double t, double dt) {
  require(std::isfinite(dt) && dt > 0.0, "langevin: dt must be > 0");
  require(std::isfinite(t) && t >= 0.0, "langevin: temperature must be >= 0");
  if (p.smoothness.beta && *p.smoothness.beta > 0.0) {
    const double beta = *p.smoothness.beta;
    double limit = t > 0.0 ? 0.1 * std::min(t, 1.0) / beta : 0.5 / beta;
    require(dt <= limit * (1.0 + 1e-12), "langevin: dt exceeds the stability limit " + std::to_string(limit));
  }
}

template <class Rng>
void initialize(const EnsembleInit& init, const StationarySampler* sampler, std::size_t d, Rng& rng,
                std::span<double> x) {
  switch (init.kind) {
    case EnsembleInit::Kind::point:
      for (std::size_t k = 0; k < d; ++k) x[k] = init.mean[k];
      break;
    case EnsembleInit::Kind::gaussian: {
      std::normal_distribution<double> n(0.0, std::sqrt(init.variance));
      for (std::size_t k = 0; k < d; ++k) x[k] = init.mean[k] + n(rng);
      break;
    }
    case EnsembleInit::Kind::stationary:
      sampler->draw(rng, x);
      break;
  }
}

void validate_init(const EnsembleInit& init, std::size_t d, double t) {
  if (init.kind == EnsembleInit::Kind::stationary) {
    require(t > 0.0, "langevin: stationary initialization needs t > 0");
  } else {
    require(init.mean.size() == d, "langevin: initialization dimension mismatch");
    if (init.kind == EnsembleInit::Kind::gaussian)
      require(init.variance > 0.0, "langevin: Gaussian initialization variance must be > 0");
  }
}

}  // namespace

std::vector<double> geometric_schedule(double step, double horizon) {
  require(step > 0.0 && horizon > 0.0, "geometric_schedule: step and horizon must be > 0");
  std::vector<double> s{0.0};
  for (double v = step; v < horizon; v *= 2.0) s.push_back(v);
  s.push_back(horizon);
  return s;
}

TrajectoryRecord gradient_flow_run(const Potential& p, const Point& x0, double horizon, double step) {
  require(x0.size() == p.dim, "gradient_flow_run: initial point dimension mismatch");
  require(std::isfinite(step) && step > 0.0, "gradient_flow_run: step must be > 0");
  require(std::isfinite(horizon) && horizon > 0.0, "gradient_flow_run: horizon must be > 0");
  if (p.smoothness.beta && *p.smoothness.beta > 0.0)
    require(step <= 0.5 / *p.smoothness.beta * (1.0 + 1e-12), "gradient_flow_run: step exceeds 0.5/beta");
  const double f_star = resolve_f_star(p);
  const std::size_t d = p.dim;

  TrajectoryRecord rec;
  Point x = x0;
  double fx = p.f(x);
  if (!std::isfinite(fx)) throw NumericalError("gradient_flow_run: non-finite objective at x0");
  double s = 0.0;
  double h = step;

  std::array<double, 2> k1{}, k2{}, k3{}, k4{};
  Point tmp(d), next(d);
  auto rk4 = [&](double dt) {
    p.grad(x, std::span<double>(k1.data(), d));
    for (std::size_t k = 0; k < d; ++k) tmp[k] = x[k] - 0.5 * dt * k1[k];
    p.grad(tmp, std::span<double>(k2.data(), d));
    for (std::size_t k = 0; k < d; ++k) tmp[k] = x[k] - 0.5 * dt * k2[k];
    p.grad(tmp, std::span<double>(k3.data(), d));
    for (std::size_t k = 0; k < d; ++k) tmp[k] = x[k] - dt * k3[k];
    p.grad(tmp, std::span<double>(k4.data(), d));
    for (std::size_t k = 0; k < d; ++k)
      next[k] = x[k] - dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  };

  for (double target : geometric_schedule(step, horizon)) {
    while (s < target) {
      const bool last = h >= target - s;
      const double dt = last ? target - s : h;
      rk4(dt);
      double fn = p.f(next);
      for (double v : next)
        if (!std::isfinite(v)) throw NumericalError("gradient_flow_run: non-finite state (blow-up)");
      if (!std::isfinite(fn)) throw NumericalError("gradient_flow_run: non-finite objective (blow-up)");
      if (fn > fx + 1e-13 * std::max(1.0, std::abs(fx))) {
        h *= 0.5;
        ++rec.step_halvings;
        if (h < 1e-14 * std::max(1.0, horizon))
          throw NumericalError("gradient_flow_run: step halving did not restore descent");
        continue;
      }
      x = next;
      fx = fn;
      s = last ? target : s + dt;
    }
    rec.times.push_back(target);
    rec.states.push_back(x);
    rec.objective_gaps.push_back(fx - f_star);
  }
  return rec;
}

ParticleEnsemble langevin_run(PotentialPtr p, double t, const EnsembleConfig& config) {
  require(p != nullptr, "langevin_run: null potential");
  require(config.particles >= 1, "langevin_run: need at least one particle");
  require(config.burn_in >= 0.0, "langevin_run: burn-in must be >= 0");
  check_langevin_step(*p, t, config.dt);
  const std::size_t d = p->dim;
  validate_init(config.init, d, t);

  std::optional<double> c_pl = resolve_c_pl(*p);
  const double radius = auto_radius(*p, t > 0.0 ? t : 1e-12, c_pl);
  std::optional<StationarySampler> sampler;
  if (config.init.kind == EnsembleInit::Kind::stationary)
    sampler.emplace(build_gibbs(p, t, config.resolution, RadiusPolicy::automatic(), c_pl));

  ParticleEnsemble ens;
  ens.t = t;
  ens.dim = d;
  ens.dt = config.dt;
  ens.rng_seed = config.seed;
  ens.particles.assign(config.particles * d, 0.0);
  const auto steps = static_cast<std::size_t>(std::llround(config.burn_in / config.dt));
  ens.elapsed = static_cast<double>(steps) * config.dt;
  LangevinStepper stepper{*p, t, config.dt, std::sqrt(2.0 * t * config.dt)};
  const Point center = grid_center(*p);

  for (std::size_t i = 0; i < config.particles; ++i) {
    auto rng = particle_stream(config.seed, i);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::span<double> x(ens.particles.data() + i * d, d);
    initialize(config.init, sampler ? &*sampler : nullptr, d, rng, x);
    stepper.advance(x, steps, rng, normal);
    for (std::size_t k = 0; k < d; ++k) {
      if (std::abs(x[k] - center[k]) > 2.0 * radius) {
        ++ens.escaped;
        break;
      }
    }
  }
  return ens;
}

KlDecay empirical_kl_decay(PotentialPtr p, double t, const EnsembleConfig& config,
                           const std::vector<double>& checkpoints, std::size_t bin_cells) {
  require(p != nullptr, "empirical_kl_decay: null potential");
  require(p->dim == 1, "empirical_kl_decay: histogram KL is implemented for 1D potentials");
  require(t > 0.0, "empirical_kl_decay: temperature must be > 0");
  require(!checkpoints.empty(), "empirical_kl_decay: no checkpoints");
  require(bin_cells >= 1, "empirical_kl_decay: bin_cells must be >= 1");
  require(checkpoints.front() >= 0.0, "empirical_kl_decay: checkpoints must be >= 0");
  for (std::size_t j = 1; j < checkpoints.size(); ++j)
    require(checkpoints[j] > checkpoints[j - 1], "empirical_kl_decay: checkpoints must be increasing");
  check_langevin_step(*p, t, config.dt);
  validate_init(config.init, 1, t);

  const GibbsGrid mu = build_gibbs(p, t, config.resolution);
  const Axis& axis = mu.geometry().axes[0];
  const std::size_t n_bins = (axis.n + bin_cells - 1) / bin_cells;
  std::vector<double> log_bin_mass(n_bins, numerics::kNegInf);
  for (std::size_t i = 0; i < axis.n; ++i)
    log_bin_mass[i / bin_cells] = numerics::log_add_exp(log_bin_mass[i / bin_cells], mu.log_weights()[i]);

  const std::size_t n_check = checkpoints.size();
  const std::size_t N = config.particles;
  std::vector<double> positions(N * n_check);
  StationarySampler sampler(mu);
  LangevinStepper stepper{*p, t, config.dt, std::sqrt(2.0 * t * config.dt)};
  for (std::size_t i = 0; i < N; ++i) {
    auto rng = particle_stream(config.seed, i);
    std::normal_distribution<double> normal(0.0, 1.0);
    double xv = 0.0;
    std::span<double> x(&xv, 1);
    initialize(config.init, &sampler, 1, rng, x);
    double now = 0.0;
    for (std::size_t j = 0; j < n_check; ++j) {
      auto steps = static_cast<std::size_t>(std::llround((checkpoints[j] - now) / config.dt));
      stepper.advance(x, steps, rng, normal);
      now = checkpoints[j];
      positions[j * N + i] = xv;
    }
  }

  KlDecay out;
  out.bin_cells = bin_cells;
  std::vector<std::size_t> counts(n_bins);
  for (std::size_t j = 0; j < n_check; ++j) {
    std::fill(counts.begin(), counts.end(), 0);
    KlCheckpoint cp;
    cp.time = checkpoints[j];
    double m1 = 0.0, m2 = 0.0;
    std::size_t inside = 0;
    for (std::size_t i = 0; i < N; ++i) {
      double xv = positions[j * N + i];
      m1 += xv;
      m2 += xv * xv;
      double idx = std::round((xv - axis.lo) / axis.step);
      if (idx < 0.0 || idx >= static_cast<double>(axis.n)) {
        ++cp.outside;
        continue;
      }
      ++counts[static_cast<std::size_t>(idx) / bin_cells];
      ++inside;
    }
    cp.mean = m1 / static_cast<double>(N);
    cp.variance = m2 / static_cast<double>(N) - cp.mean * cp.mean;
    double kl = 0.0;
    std::size_t occupied = 0;
    for (std::size_t b = 0; b < n_bins; ++b) {
      if (counts[b] == 0) continue;
      ++occupied;
      double pb = static_cast<double>(counts[b]) / static_cast<double>(inside);
      kl += pb * (std::log(pb) - log_bin_mass[b]);
    }
    cp.kl = std::max(kl, 0.0);
    cp.bias_floor = occupied > 0 ? static_cast<double>(occupied - 1) / (2.0 * static_cast<double>(N)) : 0.0;
    out.checkpoints.push_back(cp);
  }
  return out;
}

double fitted_decay_rate(const KlDecay& decay, double floor_multiple) {
  std::vector<double> ts, ys;
  for (const auto& c : decay.checkpoints) {
    if (c.kl > floor_multiple * c.bias_floor && c.kl > c.bias_floor) {
      ts.push_back(c.time);
      ys.push_back(std::log(c.kl - c.bias_floor));
    }
  }
  if (ts.size() < 2) throw NumericalError("fitted_decay_rate: fewer than two checkpoints above the bias floor");
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tm += ts[i];
    ym += ys[i];
  }
  tm /= static_cast<double>(ts.size());
  ym /= static_cast<double>(ts.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (ts[i] - tm) * (ys[i] - ym);
    sxx += (ts[i] - tm) * (ts[i] - tm);
  }
  return -sxy / sxx;
}

}  // namespace bfi
