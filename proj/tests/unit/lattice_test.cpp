#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tracekit/errors.hpp"
#include "tracekit/lattice.hpp"

using namespace tracekit;

namespace {

LatticeFunction random_field(const LatticeSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(spec.size());
  for (double& x : v) x = g(rng);
  return LatticeFunction(spec, v);
}

// ||Delta^k_{s h} u||^2 with zero extension, summed over every x where one of
// the k + 1 stencil points lands on the lattice (1-D).
double brute_energy_1d(const LatticeFunction& u, std::int64_t s, int k) {
  const auto N = static_cast<std::int64_t>(u.spec().counts[0]);
  const auto at = [&](std::int64_t i) { return i >= 0 && i < N ? u.values()[i] : 0.0; };
  double total = 0.0;
  for (std::int64_t x = -k * std::abs(s) - 1; x < N + k * std::abs(s) + 1; ++x) {
    double d = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
      d += ((k - j) % 2 ? -1.0 : 1.0) * binom * at(x + j * s);
      binom = binom * (k - j) / (j + 1);
    }
    total += d * d;
  }
  return total * u.spec().spacing;
}

}  // namespace

TEST(LatticeSpec, CoveringAndIndexing) {
  const auto spec = LatticeSpec::covering(Box{2, {-1, 0, 0}, {1, 0.5, 0}}, 0.25);
  EXPECT_EQ(spec.counts[0], 9u);
  EXPECT_EQ(spec.counts[1], 3u);
  EXPECT_DOUBLE_EQ(spec.cell_volume(), 0.0625);
  for (std::size_t i = 0; i < spec.size(); ++i) EXPECT_EQ(spec.ravel(spec.unravel(i)), i);
  EXPECT_DOUBLE_EQ(spec.point(Index3{4, 2, 0})[0], 0.0);
  EXPECT_DOUBLE_EQ(spec.point(Index3{4, 2, 0})[1], 0.5);
  EXPECT_FALSE(spec.contains(Index3{9, 0, 0}));
}

TEST(Gaussian, ExactNorm) {
  // int exp(-x^2 / w^2) dx = w sqrt(pi) per axis
  const double w = 0.3;
  for (int n = 1; n <= 3; ++n) {
    const auto g = GaussianProfile::single(n, w);
    EXPECT_NEAR(g.l2_norm(), std::pow(w * std::sqrt(std::numbers::pi), 0.5 * n), 1e-14);
  }
  const auto spec = LatticeSpec::covering(Box{1, {-4, 0, 0}, {4, 0, 0}}, 1.0 / 128.0);
  const auto u = LatticeFunction::sample(spec, GaussianProfile::single(1, w));
  EXPECT_NEAR(u.l2_norm(), GaussianProfile::single(1, w).l2_norm(), 1e-12);
}

TEST(Gaussian, SumNormUsesCrossTerms) {
  const auto a = GaussianProfile::single(1, 0.5, {0, 0, 0});
  const auto b = GaussianProfile::single(1, 0.25, {0.3, 0, 0}, -2.0);
  const auto spec = LatticeSpec::covering(Box{1, {-6, 0, 0}, {6, 0, 0}}, 1.0 / 256.0);
  const auto s = a.plus(b);
  EXPECT_NEAR(s.l2_norm(), LatticeFunction::sample(spec, s).l2_norm(), 1e-10);
}

TEST(Difference, MatchesBinomialStencil) {
  const auto spec = LatticeSpec::covering(Box{1, {0, 0, 0}, {1, 0, 0}}, 1.0 / 16.0);
  const auto u = random_field(spec, 3);
  for (int k = 1; k <= 3; ++k) {
    for (std::int64_t s : {1, 2, 5, -3}) {
      EXPECT_NEAR(difference_energy(u, Index3{s, 0, 0}, k), brute_energy_1d(u, s, k), 1e-10)
          << k << " " << s;
    }
  }
}

TEST(Difference, ShiftOfTwoIsSecondDifference) {
  const auto spec = LatticeSpec::covering(Box{1, {0, 0, 0}, {1, 0, 0}}, 0.125);
  std::vector<double> v(spec.size(), 0.0);
  v[4] = 1.0;
  const LatticeFunction u(spec, v);
  const auto d = kth_difference(u, Point{0.125, 0, 0}, 2);
  double sq = 0.0;
  for (double x : d.values()) sq += x * x;
  // stencil (1, -2, 1) applied to a delta
  EXPECT_DOUBLE_EQ(sq, 6.0);
}

TEST(Difference, InteriorDomainShrinks) {
  const auto spec = LatticeSpec::covering(Box{1, {0, 0, 0}, {1, 0, 0}}, 0.125);
  const auto u = LatticeFunction::sample(spec, [](const Point& x) { return x[0]; });
  const auto d = kth_difference(u, Point{0.25, 0, 0}, 1, DifferenceDomain::interior);
  EXPECT_EQ(d.spec().counts[0], spec.counts[0] - 2);
  for (double x : d.values()) EXPECT_NEAR(x, 0.25, 1e-15);
  const auto dd = kth_difference(u, Point{0.125, 0, 0}, 2, DifferenceDomain::interior);
  for (double x : dd.values()) EXPECT_NEAR(x, 0.0, 1e-15);
}

TEST(Difference, OffLatticeShift) {
  const auto spec = LatticeSpec::covering(Box{1, {0, 0, 0}, {1, 0, 0}}, 0.125);
  EXPECT_THROW(shift_steps(spec, Point{0.1, 0, 0}), ParameterError);
}

TEST(ShiftBall, CountsMatchEnumeration) {
  const auto spec = LatticeSpec::covering(Box{2, {0, 0, 0}, {1, 1, 0}}, 0.125);
  const double radius = 0.4;
  std::size_t brute = 0;
  for (int a = -4; a <= 4; ++a) {
    for (int b = -4; b <= 4; ++b) {
      if ((a != 0 || b != 0) && std::hypot(a, b) * 0.125 < radius) ++brute;
    }
  }
  const auto ball = half_shift_ball(spec, radius);
  EXPECT_EQ(2 * ball.size(), brute);
  for (const auto& s : ball) EXPECT_TRUE(s[0] > 0 || (s[0] == 0 && s[1] > 0));
}

TEST(Modulus, MonotoneAndMatchesMax) {
  const auto spec = LatticeSpec::covering(Box{1, {-1, 0, 0}, {1, 0, 0}}, 1.0 / 32.0);
  const auto u = random_field(spec, 17);
  const std::vector<double> ts{0.5, 0.05, 0.2};
  const auto prof = modulus_profile(u, 2, ts);
  EXPECT_LE(prof[1], prof[2]);
  EXPECT_LE(prof[2], prof[0]);
  double best = 0.0;
  for (std::int64_t s = 1; s * spec.spacing < 0.2; ++s) {
    best = std::max(best, std::sqrt(brute_energy_1d(u, s, 2)));
  }
  EXPECT_NEAR(modulus_of_continuity(u, 2, 0.2), best, 1e-12);
  EXPECT_NEAR(prof[2], best, 1e-12);
}

TEST(LatticeFunction, BoundaryMagnitude) {
  const auto spec = LatticeSpec::covering(Box{1, {-2, 0, 0}, {2, 0, 0}}, 0.25);
  const auto u = LatticeFunction::sample(spec, [](const Point& x) { return x[0]; });
  EXPECT_DOUBLE_EQ(u.boundary_magnitude(0.3), 2.0);
  EXPECT_DOUBLE_EQ(u.scaled(-2.0).plus(u).values().front(), 2.0);
}
