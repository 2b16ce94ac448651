#include "tracekit/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "tracekit/errors.hpp"
#include "tracekit/parallel.hpp"

namespace tracekit {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

LevyDensity::LevyDensity(Kind kind, double s, double cutoff, int n)
    : kind_(kind), s_(s), cutoff_(cutoff), n_(n) {
  if (!(s > 0.0 && s < 1.0)) throw ParameterError("levy density index needs 0 < s < 1");
  if (n < 1 || n > 3) throw ParameterError("levy density dimension must be 1, 2 or 3");
  if (kind == Kind::truncated_stable && !(cutoff > 0.0 && std::isfinite(cutoff))) {
    throw ParameterError("truncation radius must be finite and positive");
  }
}

LevyDensity LevyDensity::stable(double s, int n) { return {Kind::stable, s, 0.0, n}; }

LevyDensity LevyDensity::truncated_stable(double s, double cutoff, int n) {
  return {Kind::truncated_stable, s, cutoff, n};
}

LevyDensity LevyDensity::damped_stable(double s, int n) { return {Kind::damped_stable, s, 0.0, n}; }

double LevyDensity::operator()(double r) const {
  const double base = std::pow(r, -static_cast<double>(n_) - 2.0 * s_);
  switch (kind_) {
    case Kind::stable: return base;
    case Kind::truncated_stable: return r < cutoff_ ? base : 0.0;
    case Kind::damped_stable: return base / (1.0 + r);
  }
  return 0.0;
}

std::string LevyDensity::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::stable: os << "stable"; break;
    case Kind::truncated_stable: os << "truncated-stable(cutoff=" << cutoff_ << ")"; break;
    case Kind::damped_stable: os << "damped-stable"; break;
  }
  os << "(s=" << s_ << ",n=" << n_ << ")";
  return os.str();
}

LevyDensityReport levy_density_report(const LevyDensity& j, std::span<const double> r_grid) {
  LevyDensityReport report;
  std::vector<double> grid(r_grid.begin(), r_grid.end());
  for (double r : grid) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radial grid must be finite and positive");
  }
  std::sort(grid.begin(), grid.end());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (j(grid[i]) > j(grid[i - 1])) report.non_increasing = false;
  }
  for (double r : grid) {
    if (r < 1.0) continue;
    const double next = j(r + 1.0);
    const double ratio = next > 0.0 ? j(r) / next : std::numeric_limits<double>::infinity();
    report.c1 = std::max(report.c1, ratio);
  }

  // s^2 underflows before j(s) overflows near 0; the product's limit there is 0.
  auto near = [&](double s) {
    const double v = s * s * j(s);
    return std::isnan(v) ? 0.0 : v;
  };
  const double split = j.compact_support() ? std::min(1.0, j.breakpoint()) : 1.0;
  double mass = quad::tanh_sinh(near, 0.0, split).value;
  if (!j.compact_support()) {
    mass += quad::exp_sinh([&](double s) { return j(s); }, 1.0).value;
  } else if (j.breakpoint() > 1.0) {
    mass += quad::gauss_kronrod([&](double s) { return j(s); }, 1.0, j.breakpoint()).value;
  }
  report.small_jump_integral = mass;
  return report;
}

double psi_from_density(const LevyDensity& j, double xi, double rtol) {
  if (j.dimension() != 1) {
    throw UnsupportedError("psi_from_density implements the radial reduction for n = 1 only");
  }
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw DomainError("frequency must be finite and >= 0");
  if (xi == 0.0) return 0.0;

  const double half = kPi / xi;
  const double start = std::max(half, j.breakpoint());
  // Cut at a zero of cos(xi x) beyond the breakpoint so that the oscillatory
  // tail starts on a half-period boundary.
  double k = std::max(0.0, std::ceil(start / half - 0.5));
  double cut = (k + 0.5) * half;
  while (cut < start) cut = (++k + 0.5) * half;

  std::vector<double> knots{0.0};
  for (double m = 1.0; m * half < cut; m += 1.0) knots.push_back(m * half);
  if (j.breakpoint() > 0.0 && j.breakpoint() < cut) knots.push_back(j.breakpoint());
  knots.push_back(cut);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  const double inner = std::min(1e-11, 0.01 * rtol);
  auto head = [&](double x) {
    if (x < 1e-150) return 0.0;
    const double s = std::sin(0.5 * xi * x);
    return 2.0 * s * s * j(x);
  };
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const quad::Result piece = i == 0 ? quad::tanh_sinh(head, knots[0], knots[1], inner)
                                      : quad::gauss_kronrod(head, knots[i], knots[i + 1], inner);
    value += piece.value;
    error += piece.error;
  }

  if (!j.compact_support() || j.breakpoint() > cut) {
    auto density = [&](double x) { return j(x); };
    const quad::Result mass = quad::exp_sinh(density, cut, inner);
    quad::OscillatoryOptions options;
    options.rtol = inner;
    options.transition = cut;
    const quad::Result wave = quad::cosine_transform(density, xi, cut, options);
    value += mass.value - wave.value;
    error += mass.error + wave.error;
  }

  value *= 2.0;
  error *= 2.0;
  if (!std::isfinite(value) || error > rtol * std::abs(value)) {
    std::ostringstream os;
    os << "psi quadrature did not reach rtol " << rtol << " at xi=" << xi << " (estimate " << error
       << " on value " << value << ")";
    throw NumericError(os.str());
  }
  return value;
}

RatioRange check_density_kernel_equiv(const LevyDensity& j, const BernsteinSymbol& phi, double R,
                                      std::span<const double> r_grid) {
  if (r_grid.empty()) throw ParameterError("radial grid is empty");
  RatioRange range{std::numeric_limits<double>::infinity(), 0.0};
  const double n = j.dimension();
  for (double r : r_grid) {
    if (!(r > 0.0 && r < R)) throw DomainError("radial grid must lie in (0, R)");
    const double ratio = j(r) * std::pow(r, n) / phi.of_square(1.0 / r);
    range.min = std::min(range.min, ratio);
    range.max = std::max(range.max, ratio);
  }
  return range;
}

KernelProfile::KernelProfile(RadialSymbol psi, double alpha, double rtol)
    : psi_(std::move(psi)), alpha_(alpha), rtol_(rtol) {
  if (psi_.is_zero()) throw ParameterError("kernel of the zero symbol is not integrable");
  if (!(alpha > 0.0)) throw ParameterError("kernel order must be positive");
  const double delta1 = psi_.indices().delta1;
  if (!(2.0 * alpha * delta1 > 1.0)) {
    std::ostringstream os;
    os << "(1 + psi)^{-alpha/2} is not integrable: 2 alpha delta1 = " << 2.0 * alpha * delta1
       << " <= 1";
    throw ParameterError(os.str());
  }
  knee_ = std::max(1.0, invert_radial(psi_, 10.0));
}

quad::Result KernelProfile::evaluate(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("kernel argument must be positive");
  const double power = -0.5 * alpha_;
  auto multiplier = [&](double xi) { return std::pow(1.0 + psi_(xi), power); };
  quad::OscillatoryOptions options;
  options.rtol = rtol_;
  options.transition = knee_;
  quad::Result r = quad::cosine_transform(multiplier, x, 0.0, options);
  return {r.value / kPi, r.error / kPi};
}

double KernelProfile::derivative(double x) const {
  const double h = 1e-3 * x;
  return (evaluate(x + h).value - evaluate(x - h).value) / (2.0 * h);
}

double bessel_kernel(const RadialSymbol& psi, double alpha, double x) {
  return KernelProfile(psi, alpha)(x);
}

KernelDecayConstants check_kernel_decay(const RadialSymbol& psi, double alpha,
                                        const BernsteinSymbol& phi,
                                        std::span<const double> x_grid) {
  const double upper = alpha * psi.indices().upper();
  if (!(upper < 1.0)) {
    std::ostringstream os;
    os << "decay bounds need alpha (delta2 v delta4) < n; got " << upper << " >= 1";
    throw ParameterError(os.str());
  }
  for (double x : x_grid) {
    if (!(x > 0.0 && x <= 1.0)) throw DomainError("decay grid must lie in (0, 1]");
  }
  const KernelProfile kernel(psi, alpha, 1e-11);
  std::vector<double> c0(x_grid.size());
  std::vector<double> c1(x_grid.size());
  parallel::for_each_index(
      x_grid.size(),
      [&](std::size_t i) {
        const double x = x_grid[i];
        const double scale = std::pow(phi.of_square(1.0 / x), 0.5 * alpha);
        c0[i] = std::abs(kernel(x)) * x * scale;
        c1[i] = std::abs(kernel.derivative(x)) * x * x * scale;
      },
      1);
  KernelDecayConstants out;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    out.c0 = std::max(out.c0, c0[i]);
    out.c1 = std::max(out.c1, c1[i]);
  }
  return out;
}

double gaussian_bessel_potential(const RadialSymbol& psi, double alpha, double center,
                                 double width, double x) {
  if (!(width > 0.0)) throw ParameterError("gaussian width must be positive");
  const double shift = x - center;
  const double top = 9.2 / width;
  const double power = -0.5 * alpha;
  auto integrand = [&](double xi) {
    return std::cos(shift * xi) * std::pow(1.0 + psi(xi), power) *
           std::exp(-0.5 * width * width * xi * xi);
  };
  const double pieces = std::max(8.0, std::ceil(top * std::abs(shift) / kPi));
  const double step = top / pieces;
  double sum = 0.0;
  for (double p = 0.0; p < pieces; p += 1.0) {
    sum += quad::gauss_kronrod(integrand, p * step, (p + 1.0) * step, 1e-12, 10).value;
  }
  return width / std::sqrt(2.0 * kPi) * 2.0 * sum;
}

}  // namespace tracekit
