#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tracekit/errors.hpp"
#include "tracekit/symbols.hpp"

using namespace tracekit;

namespace {

// Direct evaluation of log(psi(l t) / psi(t)) / (2 log l) over a grid.
template <class Psi>
std::pair<double, double> slope_range(Psi&& psi, const std::vector<double>& ls,
                                      const std::vector<double>& ts) {
  double lo = 1e300, hi = -1e300;
  for (double l : ls) {
    if (l <= 1.0) continue;
    for (double t : ts) {
      const double v = std::log(psi(l * t) / psi(t)) / (2.0 * std::log(l));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

std::vector<double> geometric(double lo, double hi, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
  return g;
}

}  // namespace

TEST(BernsteinSymbol, PowerEvaluates) {
  const auto phi = BernsteinSymbol::power(0.5);
  EXPECT_DOUBLE_EQ(phi(4.0), 2.0);
  EXPECT_DOUBLE_EQ(phi.of_square(3.0), 3.0);
  EXPECT_DOUBLE_EQ(phi.indices().delta1, 0.5);
  EXPECT_DOUBLE_EQ(phi.indices().delta4, 0.5);
}

TEST(BernsteinSymbol, RejectsOutOfRangeParameters) {
  EXPECT_THROW(BernsteinSymbol::power(0.0), ParameterError);
  EXPECT_THROW(BernsteinSymbol::power(1.5), ParameterError);
  EXPECT_THROW(BernsteinSymbol::power_sum(0.7, 0.3), ParameterError);
  EXPECT_THROW(BernsteinSymbol::log_perturbed(0.8, 0.5), ParameterError);
}

TEST(BernsteinSymbol, OfSquareSurvivesHugeRadii) {
  const auto phi = BernsteinSymbol::log_perturbed(0.3, 0.2);
  const double r = 1e200;
  const double v = phi.of_square(r);
  EXPECT_TRUE(std::isfinite(v));
  const double expected = std::pow(r, 0.6) * std::pow(2.0 * std::log(r), 0.2);
  EXPECT_NEAR(v / expected, 1.0, 1e-10);
}

TEST(BernsteinBounds, PowerHalfAtFour) {
  const auto phi = BernsteinSymbol::power(0.5);
  const std::vector<double> l{4.0}, r{1.0};
  EXPECT_DOUBLE_EQ(phi(4.0 * 1.0) / phi(1.0), 2.0);
  EXPECT_EQ(check_bernstein_bounds(phi, l, r).max_violation, 0.0);
}

TEST(BernsteinBounds, IdentityBelowOne) {
  const auto phi = BernsteinSymbol::power(1.0);
  const std::vector<double> l{0.5}, r{3.0};
  EXPECT_DOUBLE_EQ(phi(1.5) / phi(3.0), 0.5);
  EXPECT_EQ(check_bernstein_bounds(phi, l, r).max_violation, 0.0);
}

TEST(BernsteinBounds, LogOnSmallGrid) {
  const auto phi = BernsteinSymbol::log_perturbed(0.0, 1.0);
  EXPECT_NEAR(phi(1.0), std::log(2.0), 1e-15);
  const std::vector<double> l{2.0, 8.0}, r{0.1, 1.0, 10.0};
  // ratios log(1 + l r) / log(1 + r) lie in [1, l] for l >= 1 on this grid
  for (double a : l) {
    for (double b : r) {
      const double ratio = std::log1p(a * b) / std::log1p(b);
      EXPECT_GE(ratio, 1.0);
      EXPECT_LE(ratio, a);
    }
  }
  EXPECT_EQ(check_bernstein_bounds(phi, l, r).max_violation, 0.0);
}

TEST(BernsteinBounds, NonPositiveGridIsDomainError) {
  const auto phi = BernsteinSymbol::power(0.5);
  const std::vector<double> bad{0.0, 1.0}, ok{1.0};
  EXPECT_THROW(check_bernstein_bounds(phi, bad, ok), DomainError);
  EXPECT_THROW(check_bernstein_bounds(phi, ok, bad), DomainError);
}

TEST(ScalingIndices, ExactPowerLaw) {
  const RadialSymbol psi(BernsteinSymbol::power(0.4));
  for (auto regime : {ScalingRegime::large_argument, ScalingRegime::small_argument}) {
    const auto e = estimate_scaling_indices(psi, regime);
    EXPECT_NEAR(e.lo, 0.4, 1e-12);
    EXPECT_NEAR(e.hi, 0.4, 1e-12);
  }
}

TEST(ScalingIndices, PowerSumMatchesGridOracle) {
  // psi(r) = r^0.6 + r^1.2
  const RadialSymbol psi(BernsteinSymbol::power_sum(0.3, 0.6));
  const auto ls = geometric(1.0, 1e3, 64);
  const auto ts = geometric(1.0, 1e3, 64);
  const auto oracle =
      slope_range([](double r) { return std::pow(r, 0.6) + std::pow(r, 1.2); }, ls, ts);
  const auto e = estimate_scaling_indices(psi, ScalingRegime::large_argument, ls, ts);
  EXPECT_NEAR(e.lo, oracle.first, 1e-12);
  EXPECT_NEAR(e.hi, oracle.second, 1e-12);
  EXPECT_NEAR(e.lo, 0.45246661068454147, 1e-12);
  EXPECT_NEAR(e.hi, 0.5988799913050689, 1e-12);
  EXPECT_GT(e.lo, 0.3 - 0.02);
  EXPECT_LT(e.hi, 0.6 + 0.02);
}

TEST(ScalingIndices, NonPowerSymbolIsStrictlySpread) {
  const RadialSymbol psi(BernsteinSymbol::log_perturbed(0.25, 0.5));
  const auto e = estimate_scaling_indices(psi, ScalingRegime::large_argument);
  EXPECT_LT(e.lo, e.hi);
}

TEST(ScalingIndices, DegenerateLambdaGrid) {
  const RadialSymbol psi(BernsteinSymbol::power(0.4));
  const std::vector<double> ls{1.0}, ts{1.0, 2.0};
  EXPECT_THROW(estimate_scaling_indices(psi, ScalingRegime::large_argument, ls, ts), ParameterError);
}

TEST(ScalingIndices, RegimeMismatch) {
  const RadialSymbol psi(BernsteinSymbol::power(0.4));
  const std::vector<double> ls{2.0}, ts{0.5};
  EXPECT_THROW(estimate_scaling_indices(psi, ScalingRegime::large_argument, ls, ts), ParameterError);
}

TEST(TraceExponents, Examples) {
  ScalingIndices half{0.5, 0.5, 0.5, 0.5};
  EXPECT_TRUE(check_trace_exponents(ExponentParams{1, 1.0, 1.0}, half));
  const double d = std::log(2.0) / std::log(3.0);
  EXPECT_TRUE(check_trace_exponents(ExponentParams{1, d, 1.0}, BernsteinSymbol::power(0.5)));
  EXPECT_NEAR((1.0 - d) / 2.0, 0.18453, 1e-5);
  EXPECT_FALSE(check_trace_exponents(ExponentParams{2, 1.0, 1.0}, BernsteinSymbol::power(0.3)));
}

TEST(TraceExponents, InvalidParams) {
  EXPECT_THROW(check_trace_exponents(ExponentParams{1, 2.0, 1.0}, BernsteinSymbol::power(0.5)),
               ParameterError);
  EXPECT_THROW(check_trace_exponents(ExponentParams{1, 1.0, 0.0}, BernsteinSymbol::power(0.5)),
               ParameterError);
}

TEST(LiftSymbol, HalfPower) {
  const auto lifted = lift_symbol(RadialSymbol(BernsteinSymbol::power(0.5)), 1.0);
  EXPECT_DOUBLE_EQ(lifted.alpha, 2.0);
  for (double r : {0.1, 1.0, 7.0}) EXPECT_NEAR(lifted.psi(r), r, 1e-14 * r);
  EXPECT_DOUBLE_EQ(lifted.psi.indices().delta1, 0.5);
}

TEST(LiftSymbol, PowerPointEight) {
  const auto lifted = lift_symbol(RadialSymbol(BernsteinSymbol::power(0.8)), 1.0);
  for (double r : {0.3, 2.0, 11.0}) EXPECT_NEAR(lifted.psi(r), std::pow(r, 1.3), 1e-13 * std::pow(r, 1.3));
  EXPECT_NEAR(lifted.psi.indices().delta2, 0.65, 1e-15);
}

TEST(LiftSymbol, PowerSumIndicesAgreeWithEstimate) {
  const auto lifted = lift_symbol(RadialSymbol(BernsteinSymbol::power_sum(0.3, 0.6)), 1.0);
  const auto e = estimate_scaling_indices(lifted.psi, ScalingRegime::large_argument);
  const auto idx = lifted.psi.indices();
  EXPECT_NEAR(e.lo, 0.47623330534227015, 1e-12);
  EXPECT_NEAR(e.hi, 0.5494399956525345, 1e-12);
  EXPECT_GE(e.lo, idx.delta1 - 0.02);
  EXPECT_LE(e.hi, idx.delta2 + 0.02);
}

TEST(LiftSymbol, RequiresAlphaAboveHalf) {
  EXPECT_THROW(lift_symbol(RadialSymbol(BernsteinSymbol::power(0.5)), 0.5), ParameterError);
}

TEST(InvertRadial, Examples) {
  EXPECT_NEAR(invert_radial(RadialSymbol(BernsteinSymbol::power(0.5)), 2.0), 2.0, 1e-9);
  const double r = invert_radial(RadialSymbol(BernsteinSymbol::power(0.4)), 64.0);
  EXPECT_NEAR(r, std::pow(64.0, 1.0 / 0.8), 1e-8 * r);
  EXPECT_NEAR(r, 181.01933598375618, 1e-6);
  EXPECT_NEAR(invert_radial(RadialSymbol(BernsteinSymbol::power_sum(0.5, 1.0)), 2.0), 1.0, 1e-9);
}

TEST(InvertRadial, OutsideBracket) {
  const RadialSymbol psi(BernsteinSymbol::power(0.5));
  EXPECT_THROW(invert_radial(psi, 1e20), RangeError);
  EXPECT_THROW(invert_radial(psi, 1e-20), RangeError);
  EXPECT_THROW(invert_radial(psi, -1.0), RangeError);
}

TEST(RadialSymbol, ZeroSymbol) {
  const auto z = RadialSymbol::zero();
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z(3.0), 0.0);
  EXPECT_THROW(invert_radial(z, 1.0), ParameterError);
}

TEST(LogGrid, Endpoints) {
  const auto g = log_grid(1e-3, 1e3, 7);
  ASSERT_EQ(g.size(), 7u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-3);
  EXPECT_DOUBLE_EQ(g.back(), 1e3);
  EXPECT_NEAR(g[3], 1.0, 1e-15);
}
