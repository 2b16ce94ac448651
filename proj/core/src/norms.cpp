#include "tracekit/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "tracekit/errors.hpp"
#include "tracekit/parallel.hpp"
#include "tracekit/quadrature.hpp"
#include "tracekit/sequences.hpp"

namespace tracekit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kShiftBlock = 16;
constexpr std::size_t kNodeBlock = 64;

void finish(NormReport& r) { r.total = r.l2_part + r.seminorm_part; }

double shift_length(const LatticeSpec& spec, const Index3& s) {
  return spec.spacing * std::sqrt(static_cast<double>(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]));
}

// Fraction of the lattice cell around a shift of length r inside |h| < radius.
double cell_fraction(double r, double radius, double h) {
  return std::clamp((radius - (r - 0.5 * h)) / h, 0.0, 1.0);
}

double psi_power(const RadialSymbol& psi, double r, double alpha) {
  return std::pow(psi(r), alpha);
}

// Shift list within radius and the zero-extended difference energy for each.
struct ShiftEnergies {
  std::vector<Index3> shifts;
  std::vector<double> lengths;
  std::vector<double> energies;
};

ShiftEnergies shift_energies(const LatticeFunction& u, int k, double radius,
                            std::size_t pair_cap = kDefaultPairCap) {
  ShiftEnergies s;
  s.shifts = half_shift_ball(u.spec(), radius);
  const double pairs = 2.0 * static_cast<double>(s.shifts.size()) * static_cast<double>(u.spec().size());
  if (pairs > static_cast<double>(pair_cap)) {
    std::ostringstream os;
    os << "lattice pair count " << pairs << " exceeds the cap " << pair_cap;
    throw ResourceError(os.str());
  }
  s.lengths.resize(s.shifts.size());
  s.energies.resize(s.shifts.size());
  parallel::for_each_index(
      s.shifts.size(),
      [&](std::size_t i) {
        s.lengths[i] = shift_length(u.spec(), s.shifts[i]);
        s.energies[i] = difference_energy(u, s.shifts[i], k);
      },
      kShiftBlock);
  return s;
}

// Sum over both +-h of weight(len) * energy * cell volume, in fixed order.
template <class Weight>
double weighted_shift_sum(const ShiftEnergies& s, double cell, Weight&& weight) {
  return parallel::ordered_block_sum(s.shifts.size(), kShiftBlock,
                                     [&](std::size_t begin, std::size_t end) {
                                       double acc = 0.0;
                                       for (std::size_t i = begin; i < end; ++i) {
                                         acc += 2.0 * weight(s.lengths[i]) * s.energies[i] * cell;
                                       }
                                       return acc;
                                     });
}

double angular_factor(int n, double z) {
  switch (n) {
    case 1: return 2.0 * std::cos(z);
    case 2: return 2.0 * kPi * std::cyl_bessel_j(0.0, z);
    default: return z == 0.0 ? 4.0 * kPi : 4.0 * kPi * std::sin(z) / z;
  }
}

// int_0^inf w(rho) exp(-T rho^2 / 2) rho^{n-1} A_n(rho v) d rho
template <class W>
double radial_integral(W&& w, double T, double v, int n) {
  const double top = std::sqrt(2.0 * 46.0 / T);
  auto f = [&](double rho) {
    return w(rho) * std::exp(-0.5 * T * rho * rho) * std::pow(rho, n - 1) *
           angular_factor(n, rho * v);
  };
  const double pieces = std::max(16.0, std::ceil(2.0 * top * v / kPi));
  const double step = top / pieces;
  double sum = quad::tanh_sinh(f, 0.0, step, 1e-12).value;
  for (double p = 1.0; p < pieces; p += 1.0) {
    sum += quad::gauss_kronrod(f, p * step, (p + 1.0) * step, 1e-12, 10).value;
  }
  return sum;
}

template <class W>
double profile_energy(const GaussianProfile& g, W&& w) {
  const int n = g.n;
  double sum = 0.0;
  for (std::size_t a = 0; a < g.terms.size(); ++a) {
    for (std::size_t b = a; b < g.terms.size(); ++b) {
      const auto& p = g.terms[a];
      const auto& q = g.terms[b];
      const double T = p.width * p.width + q.width * q.width;
      const double v = distance(p.center, q.center, n);
      const double factor = (a == b ? 1.0 : 2.0) * p.coef * q.coef *
                            std::pow(p.width * q.width, n);
      sum += factor * radial_integral(w, T, v, n);
    }
  }
  return sum;
}

void require_order(double alpha, const RadialSymbol& psi, int k) {
  if (k < 1) throw ParameterError("difference order must be at least 1");
  const int needed = min_difference_order(alpha, psi);
  if (k < needed) {
    std::ostringstream os;
    os << "difference order k=" << k << " is below the minimal order " << needed;
    throw ParameterError(os.str());
  }
}

}  // namespace

TraceFunction::TraceFunction(std::shared_ptr<const DMeasureQuadrature> q, std::vector<double> v)
    : quad(std::move(q)), values(std::move(v)) {
  if (!quad) throw ParameterError("trace function needs a quadrature");
  if (values.size() != quad->size()) throw ParameterError("trace values do not match the nodes");
  for (double x : values) {
    if (!std::isfinite(x)) throw DomainError("trace values must be finite");
  }
}

TraceFunction TraceFunction::sample(std::shared_ptr<const DMeasureQuadrature> q,
                                    const std::function<double(const Point&)>& f) {
  std::vector<double> v(q->size());
  for (std::size_t m = 0; m < v.size(); ++m) v[m] = f(q->nodes[m]);
  return {std::move(q), std::move(v)};
}

double TraceFunction::l2_norm() const {
  double s = 0.0;
  for (std::size_t m = 0; m < values.size(); ++m) s += quad->weights[m] * values[m] * values[m];
  return std::sqrt(s);
}

TraceFunction TraceFunction::scaled(double c) const {
  std::vector<double> v = values;
  for (double& x : v) x *= c;
  return {quad, std::move(v)};
}

TraceFunction TraceFunction::plus(const TraceFunction& other) const {
  if (other.quad != quad) throw ParameterError("trace functions live on different quadratures");
  std::vector<double> v = values;
  for (std::size_t m = 0; m < v.size(); ++m) v[m] += other.values[m];
  return {quad, std::move(v)};
}

NormReport fourier_norm(const LatticeFunction& u, const RadialSymbol& psi, double alpha) {
  if (!u.profile()) {
    throw UnsupportedError("fourier_norm needs a function with a closed-form Gaussian profile");
  }
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  const GaussianProfile& g = *u.profile();
  NormReport r;
  r.variant = "fourier";
  r.params.alpha = alpha;
  r.resolution = 0.0;
  r.l2_part = g.l2_norm();
  if (!psi.is_zero()) {
    const double semi = profile_energy(g, [&](double rho) { return psi_power(psi, rho, alpha); });
    r.seminorm_part = std::sqrt(std::max(0.0, semi));
  }
  const double full =
      profile_energy(g, [&](double rho) { return std::pow(1.0 + psi(rho), alpha); });
  r.reference = std::sqrt(std::max(0.0, full));
  finish(r);
  return r;
}

NormReport difference_norm_1(const LatticeFunction& u, const BernsteinSymbol& phi,
                             std::size_t pair_cap) {
  const LatticeSpec& spec = u.spec();
  const double n = spec.n;
  const ShiftEnergies s = shift_energies(u, 1, 1.0, pair_cap);
  const double semi = weighted_shift_sum(s, spec.cell_volume(), [&](double len) {
    return phi.of_square(1.0 / len) / std::pow(len, n);
  });
  NormReport r;
  r.variant = "(1)";
  r.params.alpha = 1.0;
  r.params.k = 1;
  r.params.h0 = 1.0;
  r.l2_part = u.l2_norm();
  r.seminorm_part = std::sqrt(std::max(0.0, semi));
  r.resolution = spec.spacing;
  r.truncation = u.boundary_magnitude(1.0);
  finish(r);
  return r;
}

NormReport difference_norm_alpha_k(const LatticeFunction& u, const RadialSymbol& psi, double alpha,
                                   int k, double h0) {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (!(h0 > 0.0)) throw ParameterError("h0 must be positive");
  require_order(alpha, psi, k);
  const LatticeSpec& spec = u.spec();
  const double h = spec.spacing;
  const double n = spec.n;
  const ShiftEnergies s = shift_energies(u, k, h0 + 0.5 * h);
  const double semi = weighted_shift_sum(s, spec.cell_volume(), [&](double len) {
    return cell_fraction(len, h0, h) * psi_power(psi, 1.0 / len, alpha) / std::pow(len, n);
  });
  NormReport r;
  r.variant = "(1),alpha,k";
  r.params.alpha = alpha;
  r.params.k = k;
  r.params.h0 = h0;
  r.l2_part = u.l2_norm();
  r.seminorm_part = std::sqrt(std::max(0.0, semi));
  r.resolution = h;
  r.truncation = u.boundary_magnitude(k * h0);
  finish(r);
  return r;
}

NormReport dyadic_norm_2(const LatticeFunction& u, const RadialSymbol& psi, double alpha, int k,
                         double c, int N) {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (!(c > 0.0)) throw ParameterError("c must be positive");
  if (N < 0) throw ParameterError("N must be nonnegative");
  require_order(alpha, psi, k);
  const LatticeSpec& spec = u.spec();
  const double h = spec.spacing;
  const int n = spec.n;
  const Box box = spec.bounds();
  double min_side = box.side(0);
  for (int a = 1; a < n; ++a) min_side = std::min(min_side, box.side(a));
  const double top = std::ldexp(c, -N);
  if (top > min_side) {
    std::ostringstream os;
    os << "c 2^-N = " << top << " exceeds the lattice box side " << min_side;
    throw ParameterError(os.str());
  }
  int J = N;
  while (std::ldexp(c, -(J + 1)) >= 2.0 * h) ++J;
  if (std::ldexp(c, -N) < 2.0 * h) {
    throw ResolutionError("the lattice does not resolve the first dyadic shell c 2^-N");
  }

  const ShiftEnergies s = shift_energies(u, k, top + 0.5 * h);
  const double cell = spec.cell_volume();
  double semi = 0.0;
  double last_inner = 0.0;
  for (int j = N; j <= J; ++j) {
    const double radius = std::ldexp(c, -j);
    const double inner = weighted_shift_sum(
        s, cell, [&](double len) { return cell_fraction(len, radius, h); });
    semi += psi_power(psi, std::ldexp(1.0, j), alpha) * std::pow(2.0, n * j) * inner;
    last_inner = inner;
  }
  // Smooth functions have int_{|h|<rho} ||Delta_h^k u||^2 ~ rho^{n+2k}.
  double tail = 0.0;
  for (int j = J + 1; j <= J + 200; ++j) {
    const double decay = std::pow(2.0, -(n + 2.0 * k) * (j - J));
    const double term =
        psi_power(psi, std::ldexp(1.0, j), alpha) * std::pow(2.0, n * j) * last_inner * decay;
    tail += term;
    if (term < 1e-18 * std::max(semi, 1e-300)) break;
  }

  NormReport r;
  r.variant = "(2),c,N";
  r.params.alpha = alpha;
  r.params.k = k;
  r.params.c = c;
  r.params.N = N;
  r.params.window = J;
  r.l2_part = u.l2_norm();
  r.seminorm_part = std::sqrt(std::max(0.0, semi));
  r.resolution = h;
  r.truncation = semi > 0.0 ? tail / semi : 0.0;
  finish(r);
  return r;
}

NormReport moura_norm(const LatticeFunction& u, std::span<const double> sigma,
                      std::span<const double> N, int k, const MouraOptions& options) {
  if (sigma.size() != N.size() || N.size() < 2) {
    throw ParameterError("sigma and N must have equal length of at least two");
  }
  if (k < 1) throw ParameterError("difference order must be at least 1");
  const GrowthBounds growth = check_admissible(N);
  check_admissible(sigma);
  if (!(growth.d0 > 1.0)) {
    throw ParameterError("N must satisfy inf N_{j+1}/N_j > 1");
  }
  if (N.size() >= 17) {
    const int window = std::min<int>(kDefaultBoydWindow, static_cast<int>((N.size() - 1) / 2));
    const int needed = min_difference_order(boyd_indices(sigma, window), boyd_indices(N, window));
    if (k < needed) {
      std::ostringstream os;
      os << "difference order k=" << k << " is below the minimal order " << needed;
      throw ParameterError(os.str());
    }
  }
  const double h = u.spec().spacing;
  int J = -1;
  for (std::size_t j = 0; j < N.size(); ++j) {
    if (1.0 / N[j] >= 2.0 * h) J = static_cast<int>(j);
  }
  if (J < options.min_window) {
    std::ostringstream os;
    os << "lattice resolves only j <= " << J << " (need " << options.min_window << ")";
    throw ParameterError(os.str());
  }
  std::vector<double> ts(static_cast<std::size_t>(J) + 1);
  for (int j = 0; j <= J; ++j) ts[static_cast<std::size_t>(j)] = 1.0 / N[static_cast<std::size_t>(j)];
  const auto omega = modulus_profile(u, k, ts);
  double semi = 0.0;
  for (int j = 0; j <= J; ++j) {
    const double s = sigma[static_cast<std::size_t>(j)] * omega[static_cast<std::size_t>(j)];
    semi += s * s;
  }
  // omega_k(u, t) ~ t^k for smooth u.
  double tail = 0.0;
  const double last = omega[static_cast<std::size_t>(J)];
  for (std::size_t j = static_cast<std::size_t>(J) + 1; j < N.size(); ++j) {
    const double w = sigma[j] * last * std::pow(N[static_cast<std::size_t>(J)] / N[j], k);
    tail += w * w;
  }

  NormReport r;
  r.variant = "moura";
  r.params.k = k;
  r.params.window = J;
  r.l2_part = u.l2_norm();
  r.seminorm_part = std::sqrt(semi);
  r.resolution = h;
  r.truncation = semi > 0.0 ? tail / semi : 0.0;
  finish(r);
  return r;
}

NormReport moura_norm(const LatticeFunction& u, const RadialSymbol& psi, double alpha, int k,
                      const MouraOptions& options) {
  const int count = 2 * kDefaultBoydWindow + 1;
  const auto sigma = smoothness_sequence(alpha, count);
  const auto N = make_N_sequence(psi, 2.0, count);
  NormReport r = moura_norm(u, sigma, N, k, options);
  r.params.alpha = alpha;
  return r;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Visits each unordered node pair with 0 < |x - y| < cutoff once.
template <class Fn>
void for_each_pair_from(const DMeasureQuadrature& q, const std::vector<std::size_t>& order,
                        std::size_t a, double cutoff, Fn&& fn) {
  const std::size_t i = order[a];
  const Point& x = q.nodes[i];
  for (std::size_t b = a + 1; b < order.size(); ++b) {
    const std::size_t j = order[b];
    const Point& y = q.nodes[j];
    if (y[0] - x[0] >= cutoff) break;
    const double r = distance(x, y, q.n);
    if (r > 0.0 && r < cutoff) fn(i, j, r);
  }
}

}  // namespace

NormReport trace_norm(const TraceFunction& tu, double d, const RadialSymbol& psi, double alpha,
                      const TraceNormOptions& options) {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  const DMeasureQuadrature& q = *tu.quad;
  const int n = q.n;
  if (!(d >= 0.0 && d <= n)) throw ParameterError("need 0 <= d <= n");
  const bool dyadic = options.variant == TraceVariant::dyadic;
  if (dyadic && !(options.c > 0.0)) throw ParameterError("c must be positive");
  if (dyadic && options.N < 0) throw ParameterError("N must be nonnegative");
  const double cutoff = dyadic ? std::ldexp(options.c, -options.N) : 1.0;

  std::vector<std::size_t> order(q.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return q.nodes[a][0] < q.nodes[b][0]; });

  const std::size_t pairs = parallel::ordered_block_reduce(
      order.size(), kNodeBlock, std::size_t{0},
      [&](std::size_t begin, std::size_t end) {
        std::size_t c = 0;
        for (std::size_t a = begin; a < end; ++a) {
          for_each_pair_from(q, order, a, cutoff, [&](std::size_t, std::size_t, double) { ++c; });
        }
        return c;
      },
      [](std::size_t x, std::size_t y) { return x + y; });

  double keep = 1.0;
  if (pairs > options.pair_cap) {
    if (!options.subsample) {
      std::ostringstream os;
      os << "trace norm needs " << pairs << " node pairs (cap " << options.pair_cap
         << "); enable subsampling or lower the depth";
      throw ResourceError(os.str());
    }
    keep = static_cast<double>(options.pair_cap) / static_cast<double>(pairs);
  }
  const std::uint64_t threshold =
      keep >= 1.0 ? std::numeric_limits<std::uint64_t>::max()
                  : static_cast<std::uint64_t>(keep * 18446744073709551615.0);

  const double exponent = 2.0 * d - n;
  // prefix[j] = sum_{i=N}^{j} psi^alpha(2^i) 2^{(2d-n) i}
  std::vector<double> prefix;
  if (dyadic) {
    double acc = 0.0;
    for (int j = 0; j <= 1000; ++j) {
      if (j >= options.N) {
        acc += psi_power(psi, std::ldexp(1.0, j), alpha) * std::pow(2.0, exponent * j);
      }
      prefix.push_back(acc);
    }
  }
  struct Partial {
    double sum = 0.0;
    int deepest = -1;
  };
  const Partial total = parallel::ordered_block_reduce(
      order.size(), kNodeBlock, Partial{0.0, options.N - 1},
      [&](std::size_t begin, std::size_t end) {
        Partial p{0.0, options.N - 1};
        for (std::size_t a = begin; a < end; ++a) {
          for_each_pair_from(q, order, a, cutoff, [&](std::size_t i, std::size_t j, double r) {
            if (keep < 1.0) {
              const std::uint64_t key = splitmix(options.seed ^ splitmix(i * 0x100000001ull + j));
              if (key > threshold) return;
            }
            const double du = tu.values[i] - tu.values[j];
            const double mass = 2.0 * du * du * q.weights[i] * q.weights[j];
            double w = 0.0;
            if (dyadic) {
              int top = static_cast<int>(std::floor(std::log2(options.c / r)));
              if (std::ldexp(options.c, -top) <= r) --top;
              if (top < options.N) return;
              top = std::min<int>(top, static_cast<int>(prefix.size()) - 1);
              p.deepest = std::max(p.deepest, top);
              w = prefix[static_cast<std::size_t>(top)];
            } else {
              w = psi_power(psi, 1.0 / r, alpha) / std::pow(r, exponent);
            }
            p.sum += mass * w;
          });
        }
        return p;
      },
      [](Partial x, const Partial& y) {
        x.sum += y.sum;
        x.deepest = std::max(x.deepest, y.deepest);
        return x;
      });

  NormReport r;
  r.variant = dyadic ? "trace(2)" : "trace(1)";
  r.params.alpha = alpha;
  r.params.depth = q.depth;
  r.params.c = dyadic ? options.c : 0.0;
  r.params.N = dyadic ? options.N : 0;
  r.params.window = dyadic ? total.deepest : 0;
  r.l2_part = tu.l2_norm();
  r.seminorm_part = std::sqrt(std::max(0.0, total.sum / keep));
  r.resolution = q.spacing;
  r.truncation = keep < 1.0 ? 1.0 - keep : 0.0;
  finish(r);
  return r;
}

}  // namespace tracekit
