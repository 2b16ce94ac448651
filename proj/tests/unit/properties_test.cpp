#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "tracekit/operators.hpp"
#include "tracekit/parallel.hpp"

using namespace tracekit;

// Seeded random trials standing in for a property-based generator: each test
// draws its cases from a fixed mt19937_64 stream so failures reproduce.

namespace {

constexpr int kTrials = 25;

struct Fixture {
  DSet D = DSet::cantor(1.0 / 3.0, 2);
  std::shared_ptr<const DMeasureQuadrature> quad =
      std::make_shared<const DMeasureQuadrature>(measure_quadrature(D, 7));
  std::shared_ptr<const WhitneyDecomposition> W;
  std::unique_ptr<ExtensionOperator> E;

  Fixture() {
    WhitneyOptions o;
    o.s_min = 1.0 / 1024.0;
    W = std::make_shared<const WhitneyDecomposition>(
        WhitneyDecomposition::build(D, Box{1, {-1, 0, 0}, {2, 0, 0}}, o));
    E = std::make_unique<ExtensionOperator>(D, quad, W);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

TraceFunction random_trace(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(fixture().quad->size());
  for (double& x : v) x = g(rng);
  return {fixture().quad, v};
}

Point random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  return {u(rng), 0, 0};
}

}  // namespace

TEST(Property, ExtensionPreservesConstants) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> c(-50.0, 50.0);
  for (int t = 0; t < kTrials; ++t) {
    const double value = c(rng);
    const auto b = fixture().E->bind(
        TraceFunction::sample(fixture().quad, [&](const Point&) { return value; }));
    for (int i = 0; i < 20; ++i) {
      const Point x = random_point(rng);
      if (fixture().W->covering(x).empty() && fixture().D.distance(x) > fixture().E->floor_radius()) {
        continue;
      }
      EXPECT_NEAR(b(x), value, 1e-12 * std::max(1.0, std::abs(value)));
    }
  }
}

TEST(Property, ExtensionStaysWithinDataRange) {
  std::mt19937_64 rng(102);
  for (int t = 0; t < kTrials; ++t) {
    const auto tu = random_trace(rng);
    const auto [lo, hi] = std::minmax_element(tu.values.begin(), tu.values.end());
    const auto b = fixture().E->bind(tu);
    for (int i = 0; i < 20; ++i) {
      const double v = b(random_point(rng));
      // 0 is the value far from D
      EXPECT_GE(v, std::min(*lo, 0.0) - 1e-12);
      EXPECT_LE(v, std::max(*hi, 0.0) + 1e-12);
    }
  }
}

TEST(Property, ExtensionIsLinear) {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int t = 0; t < kTrials; ++t) {
    const auto u = random_trace(rng);
    const auto v = random_trace(rng);
    const double a = coef(rng), c = coef(rng);
    const auto bu = fixture().E->bind(u);
    const auto bv = fixture().E->bind(v);
    const auto bw = fixture().E->bind(u.scaled(a).plus(v.scaled(c)));
    for (int i = 0; i < 10; ++i) {
      const Point x = random_point(rng);
      EXPECT_NEAR(bw(x), a * bu(x) + c * bv(x), 1e-11);
    }
  }
}

TEST(Property, RestrictionIsLinear) {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> coef(-3.0, 3.0), freq(0.5, 10.0);
  const double h = 1.0 / 512.0;
  const std::vector<double> radii{8 * h, 4 * h, 2 * h};
  for (int t = 0; t < 5; ++t) {
    const double a = coef(rng), c = coef(rng), k1 = freq(rng), k2 = freq(rng);
    const Field f = [=](const Point& x) { return std::sin(k1 * x[0]); };
    const Field g = [=](const Point& x) { return std::cos(k2 * x[0]); };
    const Field w = [=](const Point& x) { return a * f(x) + c * g(x); };
    const auto rf = restrict_field(f, h, fixture().quad, radii);
    const auto rg = restrict_field(g, h, fixture().quad, radii);
    const auto rw = restrict_field(w, h, fixture().quad, radii);
    for (std::size_t m = 0; m < rw.trace.size(); ++m) {
      EXPECT_NEAR(rw.trace.values[m], a * rf.trace.values[m] + c * rg.trace.values[m], 1e-12);
    }
  }
}

TEST(Property, NormsAreHomogeneous) {
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> scale(-4.0, 4.0);
  const RadialSymbol psi(BernsteinSymbol::power(0.5));
  const double d = fixture().D.dimension();
  const auto spec = LatticeSpec::covering(Box{1, {-1, 0, 0}, {2, 0, 0}}, 1.0 / 64.0);
  for (int t = 0; t < 8; ++t) {
    const double c = scale(rng);
    const auto tu = random_trace(rng);
    const auto a = trace_norm(tu, d, psi, 1.5);
    const auto b = trace_norm(tu.scaled(c), d, psi, 1.5);
    EXPECT_NEAR(b.total, std::abs(c) * a.total, 1e-12 * b.total);
    std::normal_distribution<double> g;
    std::vector<double> vals(spec.size());
    for (double& x : vals) x = g(rng);
    const LatticeFunction u(spec, vals);
    const auto na = difference_norm_alpha_k(u, psi, 1.0, 1);
    const auto nb = difference_norm_alpha_k(u.scaled(c), psi, 1.0, 1);
    EXPECT_NEAR(nb.total, std::abs(c) * na.total, 1e-12 * nb.total);
  }
}

TEST(Property, SeminormSatisfiesTriangleInequality) {
  std::mt19937_64 rng(106);
  const RadialSymbol psi(BernsteinSymbol::power(0.5));
  const double d = fixture().D.dimension();
  for (int t = 0; t < 8; ++t) {
    const auto u = random_trace(rng);
    const auto v = random_trace(rng);
    const double su = trace_norm(u, d, psi, 1.5).seminorm_part;
    const double sv = trace_norm(v, d, psi, 1.5).seminorm_part;
    const double sw = trace_norm(u.plus(v), d, psi, 1.5).seminorm_part;
    EXPECT_LE(sw, (su + sv) * (1 + 1e-12));
  }
}

TEST(Property, SeminormVanishesOnConstants) {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> c(-10.0, 10.0);
  const RadialSymbol psi(BernsteinSymbol::power(0.5));
  for (int t = 0; t < kTrials; ++t) {
    const double value = c(rng);
    const auto tu = TraceFunction::sample(fixture().quad, [&](const Point&) { return value; });
    EXPECT_EQ(trace_norm(tu, fixture().D.dimension(), psi, 1.5).seminorm_part, 0.0);
  }
}

TEST(Property, ResultsIndependentOfThreadCount) {
  std::mt19937_64 rng(108);
  const auto tu = random_trace(rng);
  const RadialSymbol psi(BernsteinSymbol::power(0.5));
  const auto target = LatticeSpec::covering(Box{1, {-1, 0, 0}, {2, 0, 0}}, 1.0 / 512.0);
  const unsigned saved = parallel::threads();
  parallel::set_threads(1);
  const auto serial = fixture().E->extend(tu, target);
  const double serial_norm = trace_norm(tu, fixture().D.dimension(), psi, 1.5).total;
  parallel::set_threads(4);
  const auto threaded = fixture().E->extend(tu, target);
  const double threaded_norm = trace_norm(tu, fixture().D.dimension(), psi, 1.5).total;
  parallel::set_threads(saved);
  EXPECT_EQ(serial.values(), threaded.values());
  EXPECT_EQ(serial_norm, threaded_norm);
}

TEST(Property, PartitionSumsToOneOnRandomSets) {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> lo(0.0, 0.4), len(0.1, 0.5);
  for (int t = 0; t < 10; ++t) {
    const double a = lo(rng);
    const DSet D = DSet::segment(2, a, a + len(rng));
    WhitneyOptions o;
    o.s_min = 1.0 / 64.0;
    const auto W = WhitneyDecomposition::build(D, Box{2, {-1, -1, 0}, {2, 1, 0}}, o);
    const PartitionOfUnity pou(W);
    const auto pts = sample_covered_points(W, 100, rng());
    const auto diag = measure_partition(pou, pts);
    EXPECT_LT(diag.max_sum_error, 1e-12);
    for (const auto& q : W.cubes()) {
      EXPECT_GE(q.dist.lower, q.diameter);
      EXPECT_LE(q.dist.upper, 4 * q.diameter);
    }
  }
}
