#include <gtest/gtest.h>

#include <cmath>

#include "bfi/error.hpp"
#include "bfi/pl.hpp"

using namespace bfi;

namespace {

// Brute-force 1e6-point grid plus mpmath root refinement (tests/oracles).
constexpr double kSineCpl = 0.930902155620974;
constexpr double kSineArgmax = 2.11557001739600;

std::vector<Point> inits_around_zero() {
  std::vector<Point> out;
  for (int i = -40; i <= 40; ++i)
    if (i != 0) out.push_back({0.1 * i});
  return out;
}

}  // namespace

TEST(PL, QuadraticStaticIsExact) {
  for (double a : {0.5, 1.0, 2.0}) {
    auto est = pl_constant_static(*make_quadratic(a), 200.0);
    EXPECT_NEAR(est.value, 1.0 / a, 1e-12);
    EXPECT_FALSE(est.divergent);
    EXPECT_TRUE(est.consistent());
  }
}

TEST(PL, SineStaticMatchesBruteForce) {
  auto p = make_sine_squared(1.0);
  auto est = pl_constant_static(*p, 1000.0);
  EXPECT_NEAR(est.value, kSineCpl, 1e-9);
  EXPECT_NEAR(std::abs(est.diagnostics.at("argmax")), kSineArgmax, 1e-5);
  EXPECT_EQ(est.upper, std::numeric_limits<double>::infinity());
}

TEST(PL, SineStaticStableUnderResolutionDoubling) {
  auto p = make_sine_squared(1.0);
  double a = pl_constant_static(*p, 1000.0).value;
  double b = pl_constant_static(*p, 2000.0).value;
  EXPECT_LT(std::abs(a - b) / b, 5e-4);
}

TEST(PL, QuarticPeaksAtMinimizerLimit) {
  auto p = make_quartic(1.0, 0.5);
  auto est = pl_constant_static(*p, 500.0);
  EXPECT_NEAR(est.value, 1.0, 1e-4);
  EXPECT_LE(est.value, 1.0 + 1e-12);
}

TEST(PL, DoubleWellIsDivergent) {
  auto p = make_double_well();
  auto est = pl_constant_static(*p, 200.0);
  EXPECT_TRUE(est.divergent);
  EXPECT_TRUE(std::isinf(est.value));
  EXPECT_GE(est.lower, kPlDivergenceThreshold);
  EXPECT_NEAR(est.diagnostics.at("witness"), 0.0, 1e-9);
  EXPECT_FALSE(resolve_c_pl(*p).has_value());
  try {
    require_finite_c_pl(*p);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("PL constant divergent"), std::string::npos);
  }
}

TEST(PL, SeparatedMixtureIsDivergent) {
  auto est = pl_constant_static(*make_gaussian_mixture(2.0, 0.5), 200.0);
  EXPECT_TRUE(est.divergent);
}

TEST(PL, TwoDimensionalSeparable) {
  auto p = make_separable(make_quadratic(1.0), make_quadratic(2.0));
  auto est = pl_constant_static(*p, Box::cube(2, 3.0), 20.0);
  EXPECT_NEAR(est.value, 1.0, 1e-9);
}

TEST(PL, DynamicMatchesStatic) {
  for (auto p : {make_quadratic(1.0), make_quadratic(2.0), make_sine_squared(1.0)}) {
    double st = pl_constant_static(*p, 1000.0).value;
    auto dy = pl_constant_dynamic(*p, inits_around_zero(), 2.0, 1e-3);
    EXPECT_LE(std::abs(dy.value - st) / st, 0.02) << p->name;
    EXPECT_LE(dy.value, st * (1.0 + 1e-6)) << p->name;
  }
}

TEST(PL, DynamicUnderflowIsNumericalFailure) {
  auto p = make_quadratic(1.0);
  EXPECT_THROW(pl_constant_dynamic(*p, {{2e-7}}, 4.0, 0.5), NumericalError);
  EXPECT_THROW(pl_constant_dynamic(*p, {{0.0}}, 1.0, 0.1), PreconditionError);
}

TEST(PL, QuadraticGrowthHoldsWithTrueConstant) {
  auto p = make_sine_squared(1.0);
  auto probes = uniform_probes(*p, 2001);
  auto ok = quadratic_growth_margin(*p, kSineCpl, probes);
  EXPECT_TRUE(ok.certified());
  auto bad = quadratic_growth_margin(*p, 0.25, probes);
  EXPECT_FALSE(bad.certified());
  ASSERT_EQ(bad.witness.size(), 1u);
}

TEST(PL, HessianFloor) {
  auto p = make_sine_squared(1.0);
  auto h = hessian_floor_check(*p, kSineCpl);
  EXPECT_DOUBLE_EQ(h.lambda_min, 4.0);
  EXPECT_TRUE(h.passed);
  EXPECT_FALSE(hessian_floor_check(*make_quadratic(1.0), 0.5).passed);
}
