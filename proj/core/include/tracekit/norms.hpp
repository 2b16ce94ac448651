#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tracekit/geometry.hpp"
#include "tracekit/lattice.hpp"
#include "tracekit/symbols.hpp"

namespace tracekit {

/// Values on the nodes of a d-measure quadrature.
struct TraceFunction {
  std::shared_ptr<const DMeasureQuadrature> quad;
  std::vector<double> values;

  TraceFunction(std::shared_ptr<const DMeasureQuadrature> q, std::vector<double> v);
  static TraceFunction sample(std::shared_ptr<const DMeasureQuadrature> q,
                              const std::function<double(const Point&)>& f);

  std::size_t size() const noexcept { return values.size(); }
  double l2_norm() const;
  TraceFunction scaled(double c) const;
  TraceFunction plus(const TraceFunction& other) const;
};

struct NormParams {
  double alpha = 0.0;
  int k = 0;
  double h0 = 0.0;
  double c = 0.0;
  int N = 0;
  int depth = 0;
  int window = 0;  // last dyadic / sequence index used
};

/// total = l2_part + seminorm_part.
struct NormReport {
  std::string variant;
  double l2_part = 0.0;
  double seminorm_part = 0.0;
  double total = 0.0;
  NormParams params;
  /// Lattice or node spacing the value was computed at.
  double resolution = 0.0;
  /// Size of what was cut off: tail estimate of a truncated series (relative
  /// to the seminorm squared) or the largest sample within the support margin.
  double truncation = 0.0;
  /// Fourier variant only: (int (1 + psi)^alpha |u^|^2 / (2 pi)^n)^{1/2}.
  double reference = 0.0;
};

/// Fourier-side norm of a Gaussian-profile function:
///   l2_part = ||u||, seminorm_part = ((2 pi)^-n int psi^alpha |u^|^2)^{1/2}.
NormReport fourier_norm(const LatticeFunction& u, const RadialSymbol& psi, double alpha);

/// Largest number of (lattice point, shift) pairs a difference norm visits
/// before giving up with a ResourceError.
inline constexpr std::size_t kDefaultPairCap = 4000000000ULL;

/// ||u|| + (sum over lattice pairs 0 < |x - y| < 1 of
///   |u(x) - u(y)|^2 phi(|x - y|^{-2}) / |x - y|^n dx dy)^{1/2}.
NormReport difference_norm_1(const LatticeFunction& u, const BernsteinSymbol& phi,
                             std::size_t pair_cap = kDefaultPairCap);

/// ||u|| + (int_{|h| < h0} psi^alpha(1/|h|) / |h|^n ||Delta_h^k u||^2 dh)^{1/2}.
/// Each lattice shift carries its cell volume; cells cut by |h| = h0 carry the
/// fraction inside; the cell at h = 0 is dropped. k must reach
/// min_difference_order(alpha, psi).
NormReport difference_norm_alpha_k(const LatticeFunction& u, const RadialSymbol& psi, double alpha,
                                   int k, double h0 = 1.0);

/// ||u|| + (sum_{j >= N} psi^alpha(2^j) 2^{nj} int_{|h| < c 2^-j} ||Delta_h^k u||^2 dh)^{1/2},
/// summed while c 2^-j >= 2 h.
NormReport dyadic_norm_2(const LatticeFunction& u, const RadialSymbol& psi, double alpha, int k,
                         double c = 1.0, int N = 0);

struct MouraOptions {
  /// Smallest admissible last index J with N_J^{-1} >= 2 h.
  int min_window = 2;
};

/// ||u|| + (sum_{j <= J} sigma_j^2 omega_k(u, 1/N_j)^2)^{1/2}.
NormReport moura_norm(const LatticeFunction& u, std::span<const double> sigma,
                      std::span<const double> N, int k, const MouraOptions& options = {});
/// sigma = sigma^alpha, N = N^{psi,2}.
NormReport moura_norm(const LatticeFunction& u, const RadialSymbol& psi, double alpha, int k,
                      const MouraOptions& options = {});

enum class TraceVariant { pair, dyadic };

struct TraceNormOptions {
  TraceVariant variant = TraceVariant::pair;
  double c = 1.0;
  int N = 0;
  std::size_t pair_cap = 50000000;
  /// Above the cap, keep each pair with probability cap / pairs (seeded) and
  /// rescale; otherwise the cap is a ResourceError.
  bool subsample = false;
  std::uint64_t seed = 0;
};

/// Trace norms on (D, mu):
///   pair:   ||u||_mu + (sum_{0 < |x-y| < 1} |u(x)-u(y)|^2 psi^alpha(1/|x-y|) / |x-y|^{2d-n} w_x w_y)^{1/2}
///   dyadic: ||u||_mu + (sum_{j >= N} psi^alpha(2^j) 2^{(2d-n) j}
///                       sum_{0 < |x-y| < c 2^-j} |u(x)-u(y)|^2 w_x w_y)^{1/2}
NormReport trace_norm(const TraceFunction& tu, double d, const RadialSymbol& psi, double alpha,
                      const TraceNormOptions& options = {});

}  // namespace tracekit
