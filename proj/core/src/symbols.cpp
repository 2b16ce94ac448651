#include "tracekit/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tracekit/errors.hpp"

namespace tracekit {

namespace {

// log(1 + r^2) for radii where r^2 would overflow.
double log1p_square(double r) {
  if (r < 1e150) return std::log1p(r * r);
  return 2.0 * std::log(r);
}

void require_positive_grid(std::span<const double> grid, const char* name) {
  if (grid.empty()) throw DomainError(std::string(name) + " grid is empty");
  for (double v : grid) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string(name) + " grid entries must be finite and positive");
    }
  }
}

}  // namespace

BernsteinSymbol::BernsteinSymbol(Family family, double p1, double p2)
    : family_(family), p1_(p1), p2_(p2) {
  switch (family_) {
    case Family::power:
      indices_ = {p1, p1, p1, p1};
      break;
    case Family::power_sum:
      indices_ = {p1, p2, p1, p2};
      break;
    case Family::log_perturbed:
      // Logarithmic slope of psi is s + b u / ((1 + u) log(1 + u)), u = t^2;
      // the second term decreases from b (u -> 0) through b / (2 log 2) at u = 1
      // to 0 (u -> inf).
      indices_ = {p1, p1 + p2 / (2.0 * std::numbers::ln2), p1, p1 + p2};
      break;
  }
}

BernsteinSymbol BernsteinSymbol::power(double s) {
  if (!(s > 0.0 && s <= 1.0)) throw ParameterError("power symbol needs 0 < s <= 1");
  return BernsteinSymbol(Family::power, s, 0.0);
}

BernsteinSymbol BernsteinSymbol::power_sum(double s1, double s2) {
  if (!(s1 > 0.0 && s1 <= s2 && s2 <= 1.0)) {
    throw ParameterError("power-sum symbol needs 0 < s1 <= s2 <= 1");
  }
  return BernsteinSymbol(Family::power_sum, s1, s2);
}

BernsteinSymbol BernsteinSymbol::log_perturbed(double s, double beta) {
  if (!(s >= 0.0 && beta >= 0.0 && s + beta > 0.0 && s + beta <= 1.0)) {
    throw ParameterError("log-perturbed symbol needs s, beta >= 0 and 0 < s + beta <= 1");
  }
  return BernsteinSymbol(Family::log_perturbed, s, beta);
}

double BernsteinSymbol::operator()(double x) const {
  switch (family_) {
    case Family::power: return std::pow(x, p1_);
    case Family::power_sum: return std::pow(x, p1_) + std::pow(x, p2_);
    case Family::log_perturbed: return std::pow(x, p1_) * std::pow(std::log1p(x), p2_);
  }
  return 0.0;
}

double BernsteinSymbol::of_square(double r) const {
  switch (family_) {
    case Family::power: return std::pow(r, 2.0 * p1_);
    case Family::power_sum: return std::pow(r, 2.0 * p1_) + std::pow(r, 2.0 * p2_);
    case Family::log_perturbed: return std::pow(r, 2.0 * p1_) * std::pow(log1p_square(r), p2_);
  }
  return 0.0;
}

std::string BernsteinSymbol::describe() const {
  std::ostringstream os;
  switch (family_) {
    case Family::power: os << "power(s=" << p1_ << ")"; break;
    case Family::power_sum: os << "power-sum(s1=" << p1_ << ",s2=" << p2_ << ")"; break;
    case Family::log_perturbed: os << "log-perturbed(s=" << p1_ << ",beta=" << p2_ << ")"; break;
  }
  return os.str();
}

RadialSymbol::RadialSymbol(BernsteinSymbol phi) : phi_(phi) {}

RadialSymbol RadialSymbol::zero() {
  RadialSymbol psi(BernsteinSymbol::power(1.0));
  psi.coefficient_ = 0.0;
  return psi;
}

double RadialSymbol::operator()(double r) const {
  if (coefficient_ == 0.0) return 0.0;
  double value = phi_.of_square(r);
  if (exponent_ != 1.0) value = std::pow(value, exponent_);
  if (extra_power_ != 0.0) value *= std::pow(r, extra_power_);
  return coefficient_ * value;
}

ScalingIndices RadialSymbol::indices() const {
  if (is_zero()) return {};
  const auto& base = phi_.indices();
  auto map = [this](double delta) { return exponent_ * delta + 0.5 * extra_power_; };
  return {map(base.delta1), map(base.delta2), map(base.delta3), map(base.delta4)};
}

std::string RadialSymbol::describe() const {
  if (is_zero()) return "zero";
  std::ostringstream os;
  os << "phi(r^2)";
  if (exponent_ != 1.0) os << "^" << exponent_;
  if (extra_power_ != 0.0) os << "*r^" << extra_power_;
  os << " with phi=" << phi_.describe();
  return os.str();
}

void ExponentParams::validate() const {
  if (n < 1) throw ParameterError("ambient dimension must be at least 1");
  if (!(d > 0.0 && d <= n)) throw ParameterError("need 0 < d <= n");
  if (!(alpha > 0.0)) throw ParameterError("need alpha > 0");
}

BernsteinBoundsReport check_bernstein_bounds(const BernsteinSymbol& phi,
                                             std::span<const double> lambdas,
                                             std::span<const double> rs) {
  require_positive_grid(lambdas, "lambda");
  require_positive_grid(rs, "r");
  BernsteinBoundsReport report;
  for (double lambda : lambdas) {
    const double lo = std::min(1.0, lambda);
    const double hi = std::max(1.0, lambda);
    for (double r : rs) {
      const double ratio = phi(lambda * r) / phi(r);
      const double violation = std::max({0.0, (lo - ratio) / lo, (ratio - hi) / hi});
      if (!std::isfinite(ratio)) {
        throw NumericError("bernstein ratio is not finite at lambda=" + std::to_string(lambda) +
                           ", r=" + std::to_string(r));
      }
      if (violation > report.max_violation || report.evaluations == 0) {
        if (violation >= report.max_violation) {
          report.max_violation = violation;
          report.worst_lambda = lambda;
          report.worst_r = r;
        }
      }
      ++report.evaluations;
    }
  }
  return report;
}

IndexEstimate estimate_scaling_indices(const RadialSymbol& psi, ScalingRegime regime,
                                       std::span<const double> lambdas,
                                       std::span<const double> ts) {
  if (psi.is_zero()) throw ParameterError("scaling indices of the zero symbol are undefined");
  for (double lambda : lambdas) {
    if (!(lambda >= 1.0) || !std::isfinite(lambda)) {
      throw ParameterError("lambda grid must lie in [1, inf)");
    }
  }
  for (double t : ts) {
    const bool ok = regime == ScalingRegime::large_argument ? (t >= 1.0 && std::isfinite(t))
                                                            : (t > 0.0 && t < 1.0);
    if (!ok) throw ParameterError("t grid entry outside the requested regime");
  }
  if (ts.empty()) throw ParameterError("t grid is empty");

  IndexEstimate est{std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
  bool any = false;
  for (double lambda : lambdas) {
    if (lambda == 1.0) continue;
    const double denom = 2.0 * std::log(lambda);
    for (double t : ts) {
      const double value = std::log(psi(lambda * t) / psi(t)) / denom;
      est.lo = std::min(est.lo, value);
      est.hi = std::max(est.hi, value);
      any = true;
    }
  }
  if (!any) throw ParameterError("degenerate lambda grid: no entry above 1");
  return est;
}

IndexEstimate estimate_scaling_indices(const RadialSymbol& psi, ScalingRegime regime) {
  const auto lambdas = log_grid(1.0, 1e3, 64);
  if (regime == ScalingRegime::large_argument) {
    const auto ts = log_grid(1.0, 1e3, 64);
    return estimate_scaling_indices(psi, regime, lambdas, ts);
  }
  auto ts = log_grid(1e-3, 1.0, 65);
  ts.pop_back();
  return estimate_scaling_indices(psi, regime, lambdas, ts);
}

bool check_trace_exponents(const ExponentParams& params, const ScalingIndices& indices) {
  params.validate();
  const double gap = 0.5 * (params.n - params.d);
  const double lower = params.alpha * indices.delta1;
  const double upper = params.alpha * indices.upper();
  return gap < lower && lower <= upper && upper < gap + 1.0;
}

bool check_trace_exponents(const ExponentParams& params, const BernsteinSymbol& phi) {
  return check_trace_exponents(params, phi.indices());
}

LiftedSymbol lift_symbol(const RadialSymbol& psi, double alpha) {
  if (!(alpha > 0.5)) {
    throw ParameterError("lift needs alpha > 1/2; otherwise the lifted indices reach 1");
  }
  const double lifted_alpha = 2.0 * alpha;
  RadialSymbol lifted = psi;
  lifted.exponent_ = 0.5 * psi.exponent_;
  lifted.extra_power_ = 0.5 * psi.extra_power_ + 1.0 / lifted_alpha;
  lifted.coefficient_ = std::sqrt(psi.coefficient_);
  return {lifted, lifted_alpha};
}

double invert_radial(const RadialSymbol& psi, double y, Bracket bracket, double rtol) {
  if (psi.is_zero()) throw ParameterError("cannot invert the zero symbol");
  if (!(y > 0.0) || !std::isfinite(y)) throw RangeError("target value must be finite and positive");
  if (!(bracket.lo > 0.0 && bracket.lo < bracket.hi)) throw ParameterError("invalid bracket");

  const double at_lo = psi(bracket.lo);
  const double at_hi = psi(bracket.hi);
  if (std::abs(at_lo - y) <= rtol * y) return bracket.lo;
  if (std::abs(at_hi - y) <= rtol * y) return bracket.hi;
  if (y < at_lo || y > at_hi) {
    std::ostringstream os;
    os << "value " << y << " outside [" << at_lo << ", " << at_hi << "] on the search bracket";
    throw RangeError(os.str());
  }

  double a = std::log(bracket.lo);
  double b = std::log(bracket.hi);
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (a + b);
    const double r = std::exp(mid);
    const double value = psi(r);
    if (std::abs(value - y) <= rtol * y) return r;
    if (value < y) {
      a = mid;
    } else {
      b = mid;
    }
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) {
      break;
    }
  }
  throw NumericError("bisection stalled; is the symbol strictly increasing on the bracket?");
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi >= lo)) throw ParameterError("log_grid needs 0 < lo <= hi");
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> grid(count);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = std::exp(a + step * static_cast<double>(i));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

}  // namespace tracekit
