#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "tracekit/operators.hpp"

using namespace tracekit;

namespace {

const DSet& cantor() {
  static const DSet C = DSet::cantor(1.0 / 3.0, 2);
  return C;
}

void BM_WhitneyBuild(benchmark::State& state) {
  WhitneyOptions o;
  o.s_min = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto W = WhitneyDecomposition::build(cantor(), Box{1, {-1, 0, 0}, {2, 0, 0}}, o);
    benchmark::DoNotOptimize(W.size());
  }
}
BENCHMARK(BM_WhitneyBuild)->Arg(10)->Arg(13)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_TraceNorm(benchmark::State& state) {
  auto q = std::make_shared<const DMeasureQuadrature>(
      measure_quadrature(cantor(), static_cast<int>(state.range(0))));
  const auto tu = TraceFunction::sample(q, [](const Point& x) { return std::sin(3.0 * x[0]); });
  const RadialSymbol psi(BernsteinSymbol::power(0.5));
  TraceNormOptions o;
  o.variant = TraceVariant::dyadic;
  for (auto _ : state) benchmark::DoNotOptimize(trace_norm(tu, cantor().dimension(), psi, 1.5, o).total);
}
BENCHMARK(BM_TraceNorm)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_DifferenceNorm(benchmark::State& state) {
  const auto spec = LatticeSpec::covering(Box{1, {-8, 0, 0}, {8, 0, 0}},
                                          std::ldexp(1.0, -static_cast<int>(state.range(0))));
  const auto u = LatticeFunction::sample(spec, GaussianProfile::single(1, 0.5));
  const RadialSymbol psi(BernsteinSymbol::power(0.4));
  for (auto _ : state) benchmark::DoNotOptimize(difference_norm_alpha_k(u, psi, 1.0, 1).total);
}
BENCHMARK(BM_DifferenceNorm)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_Extension(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  auto q = std::make_shared<const DMeasureQuadrature>(measure_quadrature(cantor(), m));
  WhitneyOptions o;
  o.s_min = std::ldexp(1.0, -static_cast<int>(std::ceil(m * std::log2(3.0))));
  auto W = std::make_shared<const WhitneyDecomposition>(
      WhitneyDecomposition::build(cantor(), Box{1, {-1, 0, 0}, {2, 0, 0}}, o));
  const ExtensionOperator E(cantor(), q, W);
  const auto tu = TraceFunction::sample(q, [](const Point& x) { return x[0]; });
  const auto target = LatticeSpec::covering(Box{1, {-1, 0, 0}, {2, 0, 0}}, std::ldexp(1.0, -12));
  for (auto _ : state) benchmark::DoNotOptimize(E.extend(tu, target).values().data());
}
BENCHMARK(BM_Extension)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
