#include "tracekit/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tracekit/errors.hpp"

namespace tracekit {

namespace {

void require_positive(std::span<const double> gamma) {
  for (double g : gamma) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw DomainError("sequence entries must be finite and positive");
    }
  }
}

// Smallest gap g such that every gap >= g within [0, last] has ratio >= 2;
// 0 when even the widest gap fails.
int doubling_gap(std::span<const double> N, std::size_t last) {
  int kappa = 0;
  for (std::size_t gap = last; gap >= 1; --gap) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + gap <= last; ++j) worst = std::min(worst, N[j + gap] / N[j]);
    if (worst < 2.0) break;
    kappa = static_cast<int>(gap);
  }
  return kappa;
}

}  // namespace

GrowthBounds check_admissible(std::span<const double> gamma) {
  if (gamma.size() < 2) throw ParameterError("admissibility needs at least two entries");
  require_positive(gamma);
  GrowthBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t j = 0; j + 1 < gamma.size(); ++j) {
    const double ratio = gamma[j + 1] / gamma[j];
    b.d0 = std::min(b.d0, ratio);
    b.d1 = std::max(b.d1, ratio);
  }
  return b;
}

int check_strongly_increasing(std::span<const double> N) {
  if (N.size() < 3) throw ParameterError("strong increase needs at least three entries");
  require_positive(N);
  const std::size_t last = N.size() - 1;
  const int full = doubling_gap(N, last);
  if (full == 0) {
    throw NotStronglyIncreasingError("no doubling gap exists on the window");
  }
  const int half = doubling_gap(N, last / 2);
  if (half != full) {
    std::ostringstream os;
    os << "doubling gap grows with the window (" << half << " on the leading half, " << full
       << " on the full window)";
    throw NotStronglyIncreasingError(os.str());
  }
  return full;
}

std::vector<double> make_N_sequence(const RadialSymbol& a, double r_exp, int count) {
  if (!(r_exp > 0.0)) throw ParameterError("N sequence exponent must be positive");
  if (count < 1) throw ParameterError("N sequence needs at least one entry");
  std::vector<double> N(static_cast<std::size_t>(count));
  const Bracket wide{1e-300, 1e300};
  for (int j = 0; j < count; ++j) {
    const double target = std::exp2(static_cast<double>(j) * r_exp);
    N[static_cast<std::size_t>(j)] = invert_radial(a, target, wide, 1e-12);
  }
  if (count >= 3) check_strongly_increasing(N);
  return N;
}

std::vector<double> smoothness_sequence(double alpha, int count) {
  if (count < 1) throw ParameterError("smoothness sequence needs at least one entry");
  std::vector<double> sigma(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) sigma[static_cast<std::size_t>(j)] = std::exp2(alpha * j);
  return sigma;
}

BoydIndices boyd_indices(std::span<const double> gamma, int J) {
  if (J < 8) throw ParameterError("Boyd window J must be at least 8");
  if (gamma.size() < static_cast<std::size_t>(2 * J + 1)) {
    throw ParameterError("Boyd window needs 2J + 1 sequence entries");
  }
  require_positive(gamma);
  BoydIndices out;
  out.window = J;
  out.upper = std::numeric_limits<double>::infinity();
  out.lower = -std::numeric_limits<double>::infinity();
  for (int j = J / 2; j <= J; ++j) {
    if (j == 0) continue;
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= J; ++k) {
      const double ratio = gamma[static_cast<std::size_t>(j + k)] / gamma[static_cast<std::size_t>(k)];
      hi = std::max(hi, ratio);
      lo = std::min(lo, ratio);
    }
    out.upper = std::min(out.upper, std::log(hi) / j);
    out.lower = std::max(out.lower, std::log(lo) / j);
  }
  return out;
}

int min_difference_order(const BoydIndices& sigma, const BoydIndices& N) {
  if (!(N.lower > 0.0)) throw ParameterError("lower Boyd index of N must be positive");
  const double bound = sigma.upper / N.lower;
  return static_cast<int>(std::floor(bound + 1e-8)) + 1;
}

int min_difference_order(double alpha, const RadialSymbol& psi, int J) {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  const auto sigma = smoothness_sequence(alpha, 2 * J + 1);
  const auto N = make_N_sequence(psi, 2.0, 2 * J + 1);
  return min_difference_order(boyd_indices(sigma, J), boyd_indices(N, J));
}

}  // namespace tracekit
