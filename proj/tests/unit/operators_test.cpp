#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "tracekit/errors.hpp"
#include "tracekit/operators.hpp"

using namespace tracekit;

namespace {

struct CantorSetup {
  DSet D = DSet::cantor(1.0 / 3.0, 2);
  std::shared_ptr<const DMeasureQuadrature> quad;
  std::shared_ptr<const WhitneyDecomposition> W;

  explicit CantorSetup(int depth = 8, double s_min = 1.0 / 4096.0) {
    quad = std::make_shared<const DMeasureQuadrature>(measure_quadrature(D, depth));
    WhitneyOptions o;
    o.s_min = s_min;
    W = std::make_shared<const WhitneyDecomposition>(
        WhitneyDecomposition::build(D, Box{1, {-1, 0, 0}, {2, 0, 0}}, o));
  }
};

// Eu(x) straight from the definition: every cube of the decomposition, every node.
double brute_extension(const CantorSetup& s, const TraceFunction& tu, const Point& x) {
  const PartitionOfUnity pou(*s.W);
  double total = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < s.W->size(); ++i) {
    const double z = pou.bump(i, x);
    if (z == 0.0) continue;
    total += z;
    const WhitneyCube& q = s.W->cube(i);
    if (q.side > 1.0) continue;
    double mass = 0.0, sum = 0.0;
    for (std::size_t m = 0; m < s.quad->size(); ++m) {
      if (std::abs(s.quad->nodes[m][0] - q.center[0]) < 6.0 * q.diameter) {
        mass += s.quad->weights[m];
        sum += s.quad->weights[m] * tu.values[m];
      }
    }
    acc += z * sum / mass;
  }
  return acc / total;
}

}  // namespace

TEST(BallAverage, MatchesEnumeration) {
  const double h = 0.1;
  const Point x{0.03, -0.17, 0};
  const double r = 0.35;
  const auto f = [](const Point& p) { return p[0] * p[0] + 3.0 * p[1]; };
  double sum = 0.0;
  int count = 0;
  for (int i = -10; i <= 10; ++i) {
    for (int j = -10; j <= 10; ++j) {
      const Point p{i * h, j * h, 0};
      if (std::hypot(p[0] - x[0], p[1] - x[1]) <= r) {
        sum += f(p);
        ++count;
      }
    }
  }
  EXPECT_NEAR(lattice_ball_average(f, 2, h, x, r), sum / count, 1e-14);
}

TEST(BallAverage, ClosedBallIncludesBoundary) {
  // r = 2h around a lattice point: 5 points in 1-D
  const auto f = [](const Point& p) { return p[0]; };
  EXPECT_NEAR(lattice_ball_average([](const Point&) { return 1.0; }, 1, 0.25, {0, 0, 0}, 0.5), 1.0,
              0.0);
  EXPECT_NEAR(lattice_ball_average(f, 1, 0.25, {0.5, 0, 0}, 0.5), 0.5, 1e-15);
}

TEST(Restrict, ConstantInsideLattice) {
  const CantorSetup s(6);
  const auto spec = LatticeSpec::covering(Box{1, {-2, 0, 0}, {3, 0, 0}}, 1.0 / 256.0);
  const auto u = LatticeFunction::sample(spec, [](const Point&) { return 2.5; });
  const std::vector<double> radii{1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0};
  const auto r = restrict(u, s.quad, radii);
  EXPECT_EQ(r.nonconverged, 0u);
  for (double v : r.trace.values) EXPECT_NEAR(v, 2.5, 1e-14);
  ASSERT_EQ(r.averages.size(), s.quad->size());
  EXPECT_EQ(r.averages[0].size(), 3u);
}

TEST(Restrict, OutsideLatticeCountsAsZero) {
  // nodes near 0 see half a ball outside a lattice that starts at 0
  const CantorSetup s(4);
  const auto spec = LatticeSpec::covering(Box{1, {0, 0, 0}, {1, 0, 0}}, 1.0 / 64.0);
  const auto u = LatticeFunction::sample(spec, [](const Point&) { return 1.0; });
  const std::vector<double> radii{0.25};
  const auto r = restrict(u, s.quad, radii);
  EXPECT_LT(r.trace.values.front(), 0.75);
  EXPECT_GT(r.trace.values.front(), 0.5);
}

TEST(Restrict, LinearFieldWithinOneCell) {
  const CantorSetup s(8);
  const double h = 1.0 / 1024.0;
  const auto f = [](const Point& p) { return 3.0 * p[0] - 1.0; };
  const std::vector<double> radii{8 * h, 4 * h, 2 * h};
  const auto r = restrict_field(f, h, s.quad, radii);
  for (std::size_t m = 0; m < s.quad->size(); ++m) {
    EXPECT_NEAR(r.trace.values[m], f(s.quad->nodes[m]), 3.0 * h);
  }
  EXPECT_EQ(r.nonconverged, 0u);
}

TEST(Restrict, NonconvergedNodesAreCounted) {
  const CantorSetup s(4);
  const double h = 1.0 / 256.0;
  const auto f = [](const Point& p) { return std::sin(200.0 * p[0]); };
  const std::vector<double> radii{0.1, 0.05};
  RestrictOptions o;
  o.atol = 1e-6;
  const auto r = restrict_field(f, h, s.quad, radii, o);
  std::size_t count = 0;
  for (std::size_t m = 0; m < r.averages.size(); ++m) {
    const bool ok = std::abs(r.averages[m][1] - r.averages[m][0]) < o.atol;
    EXPECT_EQ(static_cast<bool>(r.converged[m]), ok);
    count += ok ? 0 : 1;
  }
  EXPECT_EQ(r.nonconverged, count);
  EXPECT_GT(count, 0u);
}

TEST(Restrict, RadiusSchedule) {
  const CantorSetup s(4);
  const auto f = [](const Point&) { return 1.0; };
  const std::vector<double> rising{0.1, 0.2}, tiny{0.1, 0.001}, empty{};
  EXPECT_THROW(restrict_field(f, 0.01, s.quad, rising), ParameterError);
  EXPECT_THROW(restrict_field(f, 0.01, s.quad, tiny), ResolutionError);
  EXPECT_THROW(restrict_field(f, 0.01, s.quad, empty), ParameterError);
}

TEST(Extension, MatchesDefinitionAwayFromD) {
  const CantorSetup s(8, 1.0 / 512.0);
  const ExtensionOperator E(s.D, s.quad, s.W);
  const auto tu = TraceFunction::sample(s.quad, [](const Point& x) { return std::cos(4 * x[0]); });
  const auto b = E.bind(tu);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.9, 1.9);
  int checked = 0;
  while (checked < 60) {
    const Point x{u(rng), 0, 0};
    if (s.W->covering(x).empty()) continue;
    EXPECT_NEAR(b(x), brute_extension(s, tu, x), 1e-12) << x[0];
    ++checked;
  }
}

TEST(Extension, NodesKeepTheirValues) {
  const CantorSetup s(8);
  const ExtensionOperator E(s.D, s.quad, s.W);
  const auto tu = TraceFunction::sample(s.quad, [](const Point& x) { return x[0] * x[0]; });
  const auto b = E.bind(tu);
  for (std::size_t m = 0; m < s.quad->size(); m += 17) {
    if (!s.W->covering(s.quad->nodes[m]).empty()) continue;
    EXPECT_EQ(b(s.quad->nodes[m]), tu.values[m]);
  }
}

TEST(Extension, NearDFallsBackToLocalAverage) {
  const CantorSetup s(8);
  const ExtensionOperator E(s.D, s.quad, s.W);
  const auto tu = TraceFunction::sample(s.quad, [](const Point& x) { return x[0]; });
  const auto b = E.bind(tu);
  const Point x{1e-6, 0, 0};
  ASSERT_TRUE(s.W->covering(x).empty());
  double mass = 0.0, sum = 0.0;
  for (std::size_t m = 0; m < s.quad->size(); ++m) {
    if (std::abs(s.quad->nodes[m][0] - x[0]) <= E.fill_radius()) {
      mass += s.quad->weights[m];
      sum += s.quad->weights[m] * tu.values[m];
    }
  }
  EXPECT_NEAR(b(x), sum / mass, 1e-15);
}

TEST(Extension, FarAwayIsZero) {
  const CantorSetup s(6, 1.0 / 256.0);
  const ExtensionOperator E(s.D, s.quad, s.W);
  const auto tu = TraceFunction::sample(s.quad, [](const Point&) { return 1.0; });
  const auto b = E.bind(tu);
  EXPECT_EQ(b({5.0, 0, 0}), 0.0);
  EXPECT_EQ(b({-3.0, 0, 0}), 0.0);
}

TEST(Extension, ShallowQuadratureIsResolutionError) {
  const DSet D = DSet::cantor(1.0 / 3.0, 2);
  auto quad = std::make_shared<const DMeasureQuadrature>(measure_quadrature(D, 2));
  WhitneyOptions o;
  o.s_min = 1.0 / 4096.0;
  auto W = std::make_shared<const WhitneyDecomposition>(
      WhitneyDecomposition::build(D, Box{1, {-1, 0, 0}, {2, 0, 0}}, o));
  EXPECT_THROW(ExtensionOperator(D, quad, W), ResolutionError);
}

TEST(Extension, FullDimensionalSetIsRejected) {
  const DSet D = DSet::segment(1);
  auto quad = std::make_shared<const DMeasureQuadrature>(measure_quadrature(D, 4));
  const DSet P = DSet::point({0.5, 0, 0}, 1);
  auto W = std::make_shared<const WhitneyDecomposition>(
      WhitneyDecomposition::build(P, Box{1, {0, 0, 0}, {1, 0, 0}}, WhitneyOptions{}));
  EXPECT_THROW(ExtensionOperator(D, quad, W), ParameterError);
}

TEST(Extension, MismatchedTrace) {
  const CantorSetup s(6, 1.0 / 256.0);
  const ExtensionOperator E(s.D, s.quad, s.W);
  auto other = std::make_shared<const DMeasureQuadrature>(measure_quadrature(s.D, 5));
  EXPECT_THROW(E.bind(TraceFunction::sample(other, [](const Point&) { return 1.0; })),
               ParameterError);
}

TEST(Extension, SegmentInPlaneReproducesConstants) {
  const DSet D = DSet::segment(2);
  auto quad = std::make_shared<const DMeasureQuadrature>(measure_quadrature(D, 5));
  WhitneyOptions o;
  o.s_min = 1.0 / 32.0;
  auto W = std::make_shared<const WhitneyDecomposition>(
      WhitneyDecomposition::build(D, Box{2, {-1, -1, 0}, {2, 1, 0}}, o));
  const auto target = LatticeSpec::covering(Box{2, {-0.5, -0.5, 0}, {1.5, 0.5, 0}}, 1.0 / 16.0);
  const auto tu = TraceFunction::sample(quad, [](const Point&) { return -1.25; });
  const auto Eu = extend(tu, D, W, target);
  for (double v : Eu.values()) EXPECT_NEAR(v, -1.25, 1e-13);
}

TEST(Codim, IntervalConstantAndInterior) {
  const DSet D = DSet::segment(1);
  auto quad = std::make_shared<const DMeasureQuadrature>(measure_quadrature(D, 6));
  CodimOptions o;
  o.s_min = 1.0 / 64.0;
  o.lifted_bbox = Box{2, {-1, -1, 0}, {2, 1, 0}};
  o.lifted_spacing = 1.0 / 128.0;
  o.radius = 1.0 / 64.0;
  const auto target = LatticeSpec::covering(Box{1, {-0.5, 0, 0}, {1.5, 0, 0}}, 1.0 / 64.0);
  const RadialSymbol psi(BernsteinSymbol::power(0.5));
  const auto c = extend_codim(TraceFunction::sample(quad, [](const Point&) { return 3.0; }), D, psi,
                              1.0, target, o);
  for (double v : c.values.values()) EXPECT_NEAR(v, 3.0, 1e-13);
  EXPECT_EQ(c.lifted.alpha, 2.0);
  EXPECT_GT(c.cubes, 0u);
  o.radius = o.lifted_spacing;
  EXPECT_THROW(extend_codim(TraceFunction::sample(quad, [](const Point&) { return 3.0; }), D, psi,
                            1.0, target, o),
               ResolutionError);
}

TEST(Codim, RejectsLowerDimensionalSets) {
  const CantorSetup s(4);
  CodimOptions o;
  o.lifted_bbox = Box{2, {-1, -1, 0}, {2, 1, 0}};
  const auto target = LatticeSpec::covering(Box{1, {0, 0, 0}, {1, 0, 0}}, 1.0 / 16.0);
  EXPECT_THROW(extend_codim(TraceFunction::sample(s.quad, [](const Point&) { return 1.0; }), s.D,
                            RadialSymbol(BernsteinSymbol::power(0.5)), 1.0, target, o),
               ParameterError);
}

TEST(OperatorNorms, ZeroFunctionIsDegenerate) {
  const CantorSetup s(6, 1.0 / 256.0);
  const ExtensionOperator E(s.D, s.quad, s.W);
  std::vector<TestFunction> family{
      {"zero", [](const Point&) { return 0.0; }, std::nullopt},
      {"linear", [](const Point& x) { return x[0]; }, std::nullopt},
  };
  PipelineSpec spec;
  spec.pipeline = Pipeline::extend;
  spec.alpha = 1.5;
  spec.psi = RadialSymbol(BernsteinSymbol::power(0.5));
  spec.lattice = LatticeSpec::covering(Box{1, {-1, 0, 0}, {2, 0, 0}}, 1.0 / 256.0);
  spec.k = 2;
  const auto sum = measure_operator_norms(family, spec, s.D, s.quad, &E);
  ASSERT_EQ(sum.rows.size(), 2u);
  EXPECT_TRUE(sum.rows[0].degenerate);
  EXPECT_TRUE(std::isnan(sum.rows[0].ratio));
  EXPECT_FALSE(sum.rows[1].degenerate);
  EXPECT_EQ(sum.max_ratio, sum.rows[1].ratio);
  EXPECT_NEAR(sum.rows[1].ratio, sum.rows[1].output_norm / sum.rows[1].input_norm, 1e-15);
}

TEST(OperatorNorms, ExtensionPipelineNeedsOperator) {
  const CantorSetup s(4, 1.0 / 64.0);
  std::vector<TestFunction> family{{"one", [](const Point&) { return 1.0; }, std::nullopt}};
  PipelineSpec spec;
  spec.pipeline = Pipeline::roundtrip;
  EXPECT_THROW(measure_operator_norms(family, spec, s.D, s.quad), ParameterError);
}

TEST(Lemma, RatiosArePositiveAndGated) {
  const DSet D = DSet::cantor(1.0 / 3.0, 2);
  const auto quad = measure_quadrature(D, 8);
  const RadialSymbol psi(BernsteinSymbol::power(0.5));
  const auto spec = LatticeSpec::covering(Box{1, {-8, 0, 0}, {8, 0, 0}}, 1.0 / 64.0);
  const auto f = LatticeFunction::sample(spec, GaussianProfile::single(1, 0.5, {0.5, 0, 0}));
  const std::vector<double> radii{1.0 / 3.0, 1.0 / 9.0};
  const auto rep = restriction_lemma_check(psi, 1.5, D, quad, f, radii);
  ASSERT_EQ(rep.ratios.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_GT(rep.ratios[i], 0.0);
    EXPECT_NEAR(rep.ratios[i], rep.lhs[i] / rep.rhs[i], 1e-15 * rep.ratios[i]);
  }
  EXPECT_THROW(restriction_lemma_check(psi, 3.0, D, quad, f, radii), ParameterError);
  const auto plain = LatticeFunction::sample(spec, [](const Point& x) { return x[0]; });
  EXPECT_THROW(restriction_lemma_check(psi, 1.5, D, quad, plain, radii), UnsupportedError);
}
