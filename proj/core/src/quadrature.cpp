#include "tracekit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "tracekit/errors.hpp"

namespace tracekit::quad {

namespace bq = boost::math::quadrature;

namespace {

void require_finite(double value, const char* where) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string(where) + ": quadrature produced a non-finite value");
  }
}

}  // namespace

Result gauss_kronrod(const Integrand& f, double a, double b, double rtol, unsigned max_depth) {
  if (a == b) return {};
  double error = 0.0;
  double l1 = 0.0;
  const double value =
      bq::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, rtol, &error, &l1);
  require_finite(value, "gauss_kronrod");
  return {value, error * std::max(l1, std::abs(value))};
}

Result tanh_sinh(const Integrand& f, double a, double b, double rtol) {
  if (a == b) return {};
  thread_local bq::tanh_sinh<double> integrator(12);
  double error = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double value = integrator.integrate(f, a, b, rtol, &error, &l1, &levels);
  require_finite(value, "tanh_sinh");
  return {value, error * std::max(l1, std::abs(value))};
}

Result exp_sinh(const Integrand& f, double a, double rtol) {
  thread_local bq::exp_sinh<double> integrator(12);
  double error = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  auto shifted = [&](double t) { return f(a + t); };
  const double value = integrator.integrate(shifted, 0.0, std::numeric_limits<double>::infinity(),
                                            rtol, &error, &l1, &levels);
  require_finite(value, "exp_sinh");
  return {value, error * std::max(l1, std::abs(value))};
}

double euler_sum(std::span<const double> terms) {
  if (terms.empty()) return 0.0;
  std::vector<double> partial(terms.size());
  double running = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    running += terms[i];
    partial[i] = running;
  }
  for (std::size_t len = partial.size(); len > 1; --len) {
    for (std::size_t i = 0; i + 1 < len; ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
  }
  return partial.front();
}

Result cosine_transform(const Integrand& g, double omega, double a,
                        const OscillatoryOptions& options) {
  if (!(omega > 0.0)) throw ParameterError("cosine_transform: omega must be positive");
  const double half_period = std::numbers::pi / omega;
  auto zero = [&](std::size_t k) { return (static_cast<double>(k) + 0.5) * half_period; };
  auto integrand = [&](double t) { return g(t) * std::cos(omega * t); };

  std::size_t k = 0;
  if (a > 0.0) k = static_cast<std::size_t>(std::max(0.0, std::floor(a / half_period - 0.5)));
  while (zero(k) <= a) ++k;

  Result head = tanh_sinh(integrand, a, zero(k), options.rtol);
  double direct = head.value;
  double error = head.error;

  std::size_t steps = 0;
  while (zero(k) < options.transition) {
    const Result piece = gauss_kronrod(integrand, zero(k), zero(k + 1), options.rtol, 8);
    direct += piece.value;
    error += piece.error;
    ++k;
    if (++steps > options.max_direct_terms) {
      throw NumericError("cosine_transform: too many half periods below the transition point");
    }
  }

  const std::size_t count = std::max<std::size_t>(options.accelerated_terms, 12);
  std::vector<double> terms(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Result piece = gauss_kronrod(integrand, zero(k + i), zero(k + i + 1), options.rtol, 8);
    terms[i] = piece.value;
    error += piece.error;
  }
  const double tail = euler_sum(terms);
  const double tail_short = euler_sum(std::span<const double>(terms).first(count - 6));
  error += std::abs(tail - tail_short);
  return {direct + tail, error};
}

}  // namespace tracekit::quad
