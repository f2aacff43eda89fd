#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>

#include "bfi/error.hpp"
#include "bfi/measures.hpp"

using namespace bfi;

namespace {

// Independent adaptive Simpson quadrature.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double eps, int depth) {
  double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps = 1e-13) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 50);
}

// mpmath quadrature of e^{−(x² + sin² x)/t} on [−20, 20] (tests/oracles).
struct SineReference {
  double t, Z, var_z, gap;
};
constexpr SineReference kSine[] = {
    {0.2, 0.567797851036274, 0.2636558074, 0.0129377839},
    {0.1, 0.398860162392936, 0.2565240719, 0.006356800138},
    {0.05, 0.281134123736916, 0.2531917713, 0.003151369281},
    {0.02, 0.177467823507655, 0.2512605218, 0.001254187557},
    {0.01, 0.125409901311313, 0.2506276173, 0.0006260442745},
};

}  // namespace

TEST(Measures, WeightsAreAProbabilityVector) {
  auto mu = build_gibbs(make_sine_squared(1.0), 0.05, 200);
  double s = std::accumulate(mu.weights().begin(), mu.weights().end(), 0.0);
  EXPECT_NEAR(s, 1.0, 1e-12);
  for (std::size_t i = 0; i < mu.size(); ++i) EXPECT_NEAR(std::exp(mu.log_weights()[i]), mu.weights()[i], 1e-300);
}

TEST(Measures, SinePartitionFunctionMatchesReference) {
  for (const auto& ref : kSine) {
    auto mu = build_gibbs(make_sine_squared(1.0), ref.t, 400);
    EXPECT_NEAR(mu.log_Z(), std::log(ref.Z), 1e-9) << "t=" << ref.t;
    EXPECT_NEAR(rescaled_moments(mu).var_z[0], ref.var_z, 1e-8) << "t=" << ref.t;
    EXPECT_NEAR(laplace_gap(mu), ref.gap, 1e-9) << "t=" << ref.t;
  }
}

TEST(Measures, PartitionFunctionMatchesAdaptiveSimpson) {
  auto p = make_quartic(1.0, 0.5);
  const double t = 0.3;
  auto mu = build_gibbs(p, t, 300);
  double z = integrate([&](double x) { return std::exp(-p->value(x) / t); }, -20.0, 20.0);
  EXPECT_NEAR(mu.log_Z(), std::log(z), 1e-9);
}

TEST(Measures, GaussianLaplaceGapVanishes) {
  for (double a : {0.5, 1.0, 2.0})
    for (double t : {1.0, 0.1}) EXPECT_NEAR(laplace_gap(make_quadratic(a), t, 200), 0.0, 1e-8) << a << " " << t;
}

TEST(Measures, AutoRadiusFormula) {
  auto p = make_quadratic(1.0);
  EXPECT_NEAR(auto_radius(*p, 1.0, 1.0), 6.0 * 5.0, 1e-12);
  EXPECT_DOUBLE_EQ(auto_radius(*p, 1e-4, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(auto_radius(*p, 1.0, std::nullopt), 20.0);
  auto mu = build_gibbs(p, 0.5, 100);
  EXPECT_TRUE(mu.tail_bound_honored());
  EXPECT_LT(mu.tail_envelope(), kTailThreshold);
}

TEST(Measures, TruncationTooTightIsNumericalFailure) {
  EXPECT_THROW(build_gibbs(make_quadratic(1.0), 1.0, 100, RadiusPolicy::fixed(1.0)), NumericalError);
  EXPECT_THROW(build_gibbs(make_quadratic(1.0), -1.0, 100), PreconditionError);
}

TEST(Measures, GaussianShiftKlAndFisherAreExact) {
  auto mu = build_gibbs(make_quadratic(1.0), 1.0, 200);
  for (double m : {0.5, 1.0, 2.0}) {
    auto nu = TestDensity::gaussian(mu, m, 1.0);
    EXPECT_NEAR(kl_divergence(nu, mu), 0.5 * m * m, 1e-8);
    EXPECT_NEAR(fisher_information(nu, mu), m * m, 1e-8);
  }
}

TEST(Measures, SelfDivergenceVanishes) {
  auto mu = build_gibbs(make_sine_squared(1.0), 0.1, 200);
  auto nu = TestDensity::matching(mu);
  EXPECT_NEAR(kl_divergence(nu, mu), 0.0, 1e-14);
  EXPECT_NEAR(fisher_information(nu, mu), 0.0, 1e-14);
}

TEST(Measures, KlIsNonNegativeOnRandomDensities) {
  auto mu = build_gibbs(make_sine_squared(0.5), 0.2, 50);
  std::uint64_t state = 12345;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> lm(mu.size());
    for (auto& v : lm) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      v = static_cast<double>(state >> 11) / 9007199254740992.0 * 4.0;
    }
    auto nu = TestDensity::from_log_masses(mu, lm);
    EXPECT_GE(kl_divergence(nu, mu), 0.0);
    EXPECT_GE(fisher_information(nu, mu), 0.0);
  }
}

TEST(Measures, FisherHasNoCheckerboardNullSpace) {
  auto mu = build_gibbs(make_quadratic(1.0), 1.0, 20);
  std::vector<double> lm(mu.log_weights().begin(), mu.log_weights().end());
  for (std::size_t i = 0; i < lm.size(); ++i) lm[i] += (i % 2 ? 0.3 : -0.3);
  auto nu = TestDensity::from_log_masses(mu, lm);
  EXPECT_GT(fisher_information(nu, mu), 1.0);
}

TEST(Measures, ForeignGeometryIsRejected) {
  auto a = build_gibbs(make_quadratic(1.0), 1.0, 100);
  auto b = build_gibbs(make_quadratic(1.0), 1.0, 101);
  auto nu = TestDensity::gaussian(b, 0.0, 1.0);
  EXPECT_THROW(kl_divergence(nu, a), PreconditionError);
  EXPECT_THROW(fisher_information(nu, a), PreconditionError);
}

TEST(Measures, BoundaryCellsCarryNoTestMass) {
  auto mu = build_gibbs(make_quadratic(1.0), 1.0, 50);
  auto nu = TestDensity::gaussian(mu, 0.0, 3.0);
  EXPECT_FALSE(nu.in_support(0));
  EXPECT_FALSE(nu.in_support(nu.size() - 1));
  EXPECT_TRUE(nu.in_support(nu.size() / 2));
}

TEST(Measures, TwoDimensionalSeparableFactorizes) {
  auto p = make_separable(make_quadratic(1.0), make_quadratic(2.0));
  auto mu = build_gibbs(p, 0.5, 10);
  const double expected = std::log(2.0 * std::numbers::pi * 0.5) - 0.5 * std::log(2.0);
  EXPECT_NEAR(mu.log_Z(), expected, 1e-8);
  EXPECT_NEAR(laplace_gap(mu), 0.0, 1e-8);
  auto m = rescaled_moments(mu);
  EXPECT_NEAR(m.var_z[0], 1.0, 1e-6);
  EXPECT_NEAR(m.var_z[1], 0.5, 1e-6);
}

TEST(Measures, CsvDumpHasOneLinePerNode) {
  auto mu = build_gibbs(make_quadratic(1.0), 1.0, 5);
  std::ostringstream os;
  mu.write_csv(os);
  std::string s = os.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), mu.size() + 1);
  EXPECT_EQ(s.substr(0, s.find('\n')), "x,f,weight");
}

TEST(Measures, LaplaceGapShrinksWithTemperature) {
  auto p = make_sine_squared(1.0);
  double g1 = std::abs(laplace_gap(p, 0.1, 400));
  double g2 = std::abs(laplace_gap(p, 0.01, 400));
  EXPECT_LT(g2, 0.05);
  EXPECT_LT(g2, g1);
}
