#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bfi/potentials.hpp"

namespace bfi {

/// Uniform axis x_i = lo + i·step, i = 0..n−1.
struct Axis {
  double lo = 0.0;
  double step = 1.0;
  std::size_t n = 0;

  double operator[](std::size_t i) const { return lo + step * static_cast<double>(i); }
  double hi() const { return (*this)[n - 1]; }
  bool operator==(const Axis&) const = default;
};

/// Tensor grid; flat index is row-major (last axis fastest).
struct GridGeometry {
  std::vector<Axis> axes;

  std::size_t dim() const { return axes.size(); }
  std::size_t size() const;
  std::size_t stride(std::size_t axis) const;
  std::size_t index_along(std::size_t flat, std::size_t axis) const;
  double coordinate(std::size_t flat, std::size_t axis) const;
  Point point(std::size_t flat) const;
  double cell_volume() const;
  bool on_boundary(std::size_t flat) const;
  bool operator==(const GridGeometry&) const = default;
};

struct RadiusPolicy {
  enum class Kind { automatic, fixed };
  Kind kind = Kind::automatic;
  double radius = 0.0;

  static RadiusPolicy automatic() { return {}; }
  static RadiusPolicy fixed(double r) { return {Kind::fixed, r}; }
};

/// Probability threshold for the quadratic-growth tail envelope outside the
/// truncation box.
inline constexpr double kTailThreshold = 1e-10;

/// Truncated-grid Gibbs measure μ_t ∝ e^{−f/t}.
///
/// Weights are probability masses (trapezoid coefficients folded in), kept in
/// log form as well so that far-tail cells stay representable at small t.
/// Edge weights are the Gibbs density at edge midpoints times the cell
/// volume, used by Dirichlet-form discretizations.
class GibbsGrid {
 public:
  const Potential& potential() const { return *potential_; }
  const PotentialPtr& potential_ptr() const { return potential_; }
  double temperature() const { return t_; }
  const GridGeometry& geometry() const { return geometry_; }
  std::size_t size() const { return f_values_.size(); }
  std::size_t dim() const { return geometry_.dim(); }
  double spacing(std::size_t axis = 0) const { return geometry_.axes[axis].step; }
  std::span<const double> points() const { return points_; }  // 1D coordinates
  std::span<const double> f_values() const { return f_values_; }
  std::span<const double> log_weights() const { return log_weights_; }
  std::span<const double> weights() const { return weights_; }
  /// Edge log-masses along `axis`, indexed by the flat index of the left
  /// node; −∞ where the node has no right neighbour along that axis.
  std::span<const double> edge_log_weights(std::size_t axis = 0) const { return edge_log_weights_[axis]; }
  double log_Z() const { return log_Z_; }
  double Z() const;
  const Point& center() const { return center_; }
  double truncation_radius() const { return radius_; }
  /// Quadratic-growth envelope mass outside the box, relative to Z_t; NaN
  /// when no finite PL constant was available.
  double tail_envelope() const { return tail_envelope_; }
  bool tail_bound_honored() const { return tail_envelope_ < kTailThreshold; }
  std::optional<double> c_pl_used() const { return c_pl_; }

  /// CSV columns x[, y], f, weight.
  void write_csv(std::ostream& os) const;

 private:
  friend GibbsGrid build_gibbs(PotentialPtr, double, double, RadiusPolicy, std::optional<double>);
  friend GibbsGrid build_gibbs_on(PotentialPtr, double, GridGeometry, std::optional<double>);

  PotentialPtr potential_;
  double t_ = 1.0;
  GridGeometry geometry_;
  std::vector<double> points_;
  std::vector<double> f_values_;
  std::vector<double> log_weights_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> edge_log_weights_;
  double log_Z_ = 0.0;
  Point center_;
  double radius_ = 0.0;
  double tail_envelope_ = 0.0;
  std::optional<double> c_pl_;
};

/// Truncation radius of the automatic policy:
/// max(6·sqrt(C_PL·t)·(sqrt(d) + 4), 4), or the working-domain half-width
/// when no finite PL constant is known.
double auto_radius(const Potential& p, double t, std::optional<double> c_pl);

/// Build μ_t on a grid centred at the minimizer (or the domain centre) with
/// `resolution` points per unit length. `c_pl_hint` overrides the PL
/// constant used for the automatic radius and the tail envelope.
GibbsGrid build_gibbs(PotentialPtr p, double t, double resolution,
                      RadiusPolicy policy = RadiusPolicy::automatic(),
                      std::optional<double> c_pl_hint = std::nullopt);

/// Build μ_t on an explicit geometry (used to share axes between measures).
GibbsGrid build_gibbs_on(PotentialPtr p, double t, GridGeometry geometry,
                         std::optional<double> c_pl_hint = std::nullopt);

/// Probability density on a GibbsGrid's nodes, stored as log-masses
/// (−∞ for empty cells). Boundary cells carry no mass except for
/// `matching`, which copies μ itself.
class TestDensity {
 public:
  using LogDensity = std::function<double(std::span<const double>)>;

  /// q_i ∝ e^{−g(x_i)}; g is the negative log-density up to a constant.
  static TestDensity from_neg_log_density(const GibbsGrid& mu, const LogDensity& g);
  /// Truncated N(mean, sigma²) (isotropic in 2D).
  static TestDensity gaussian(const GibbsGrid& mu, std::span<const double> mean, double sigma);
  static TestDensity gaussian(const GibbsGrid& mu, double mean, double sigma);
  /// Normalizes the given log-masses; boundary cells are forced empty.
  static TestDensity from_log_masses(const GibbsGrid& mu, std::vector<double> log_masses);
  /// ν = μ.
  static TestDensity matching(const GibbsGrid& mu);

  const GridGeometry& geometry() const { return geometry_; }
  std::size_t size() const { return log_masses_.size(); }
  std::span<const double> log_masses() const { return log_masses_; }
  std::span<const double> masses() const { return masses_; }
  /// g_i with q_i = e^{−g_i}·ΔV.
  double neg_log_density(std::size_t i) const;
  bool in_support(std::size_t i) const { return masses_[i] > 0.0; }

 private:
  TestDensity(GridGeometry geometry, std::vector<double> log_masses, bool clear_boundary);

  GridGeometry geometry_;
  std::vector<double> log_masses_;
  std::vector<double> masses_;
};

/// Σ q_i log(q_i / w_i), with 0·log 0 := 0.
double kl_divergence(const TestDensity& nu, const GibbsGrid& mu);

/// Σ_i q_i · Σ_axes mean over in-support neighbours j of
/// ((u_j − u_i)/Δx)², u = log(q/w). Interior nodes average the two
/// one-sided squared differences; support edges use the one available.
double fisher_information(const TestDensity& nu, const GibbsGrid& mu);

struct RescaledMoments {
  Point mean_z;  // per axis, z = (x − x*)/sqrt(t)
  Point var_z;   // per-axis central second moment of z
};

RescaledMoments rescaled_moments(const GibbsGrid& mu);

/// log(Z_t / sqrt(det(2π Σ_t))) with Σ_t = t [∇²f(x*)]^{−1} and f(x*) = 0.
double laplace_gap(const GibbsGrid& mu);
double laplace_gap(PotentialPtr p, double t, double resolution = 200.0);

}  // namespace bfi
