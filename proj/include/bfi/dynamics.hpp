#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bfi/measures.hpp"
#include "bfi/potentials.hpp"

namespace bfi {

/// Gradient-flow samples x_s with objective gaps f(x_s) − f*.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Point> states;
  std::vector<double> objective_gaps;
  int step_halvings = 0;
};

/// Sample times {0, h, 2h, 4h, …} capped by and ending at S.
std::vector<double> geometric_schedule(double step, double horizon);

/// Integrates ẋ = −∇f(x) with classical RK4 steps of size ≤ h, halving the
/// step whenever f would increase. Requires a declared f* (or minimizer).
TrajectoryRecord gradient_flow_run(const Potential& p, const Point& x0, double horizon, double step);

struct EnsembleInit {
  enum class Kind { point, gaussian, stationary };
  Kind kind = Kind::stationary;
  Point mean;        // point location or Gaussian mean
  double variance = 1.0;

  static EnsembleInit at(Point x) { return {Kind::point, std::move(x), 0.0}; }
  static EnsembleInit normal(Point mean, double var) { return {Kind::gaussian, std::move(mean), var}; }
  static EnsembleInit stationary() { return {}; }
};

struct EnsembleConfig {
  std::size_t particles = 10000;
  double dt = 1e-3;
  double burn_in = 0.0;  // simulated time before the returned state
  std::uint64_t seed = 1;
  EnsembleInit init;
  double resolution = 200.0;  // grid for stationary sampling and escape radius
};

/// Langevin particles X_s^t after `burn_in` units of simulated time.
struct ParticleEnsemble {
  double t = 0.0;
  std::size_t dim = 1;
  std::vector<double> particles;  // N × dim, row-major
  double dt = 0.0;
  std::uint64_t rng_seed = 0;
  double elapsed = 0.0;
  std::size_t escaped = 0;  // beyond 2× the truncation radius at the end

  std::size_t size() const { return dim == 0 ? 0 : particles.size() / dim; }
};

/// Euler–Maruyama for dX = −∇f(X) ds + sqrt(2t) dB. Each particle owns an
/// RNG stream keyed by (seed, particle index), so results do not depend on
/// evaluation order.
ParticleEnsemble langevin_run(PotentialPtr p, double t, const EnsembleConfig& config);

struct KlCheckpoint {
  double time = 0.0;
  double kl = 0.0;
  double bias_floor = 0.0;  // (occupied bins − 1)/(2N): leading histogram bias
  double mean = 0.0;
  double variance = 0.0;
  std::size_t outside = 0;  // particles outside the grid
};

struct KlDecay {
  std::vector<KlCheckpoint> checkpoints;
  std::size_t bin_cells = 1;
  /// Histogram KL is biased upward by O(bins/N).
  bool biased_estimate = true;
};

/// Histogram KL of the particle law against μ_t at each checkpoint. Bins
/// are groups of `bin_cells` consecutive grid cells (1D only).
KlDecay empirical_kl_decay(PotentialPtr p, double t, const EnsembleConfig& config,
                           const std::vector<double>& checkpoints, std::size_t bin_cells = 8);

/// Least-squares slope of −log KL against time, using checkpoints whose KL
/// exceeds `floor_multiple` times their bias floor.
double fitted_decay_rate(const KlDecay& decay, double floor_multiple = 5.0);

}  // namespace bfi
