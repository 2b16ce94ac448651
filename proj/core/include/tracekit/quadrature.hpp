#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace tracekit::quad {

using Integrand = std::function<double(double)>;

struct Result {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (31 point) on a finite interval, smooth integrands.
Result gauss_kronrod(const Integrand& f, double a, double b, double rtol = 1e-11,
                     unsigned max_depth = 15);

/// Double-exponential rule on a finite interval; tolerates integrable
/// endpoint singularities.
Result tanh_sinh(const Integrand& f, double a, double b, double rtol = 1e-11);

/// Double-exponential rule on [a, inf) for non-oscillatory decaying integrands.
Result exp_sinh(const Integrand& f, double a, double rtol = 1e-11);

/// Sum of an alternating series through repeated averaging of its partial
/// sums (Euler transform).
double euler_sum(std::span<const double> terms);

struct OscillatoryOptions {
  double rtol = 1e-11;
  /// Below this abscissa half-periods are summed directly; above it the
  /// half-period contributions are treated as a smooth alternating series.
  double transition = 1.0;
  std::size_t accelerated_terms = 40;
  std::size_t max_direct_terms = 200000;
};

/// Integral of g(t) cos(omega t) over [a, inf). The interval is cut at the
/// zeros (k + 1/2) pi / omega of the cosine and the tail of the resulting
/// alternating series is summed with euler_sum. g must decay to zero and be
/// eventually monotone.
Result cosine_transform(const Integrand& g, double omega, double a = 0.0,
                        const OscillatoryOptions& options = {});

}  // namespace tracekit::quad
