#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tracekit {

/// Scaling exponents of a radial symbol psi:
///   (H1) a1 l^{2 delta1} psi(t) <= psi(l t) <= a2 l^{2 delta2} psi(t),  l >= 1, t >= 1
///   (H2) a3 l^{2 delta3} psi(t) <= psi(l t) <= a4 l^{2 delta4} psi(t),  l >= 1, t < 1
struct ScalingIndices {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  double delta4 = 0.0;

  double upper() const noexcept { return delta2 > delta4 ? delta2 : delta4; }
};

/// Multiplicative constants a1..a4 of the scaling bounds. All shipped
/// families have unit constants because their logarithmic slopes are bounded
/// pointwise by the declared indices.
struct ScalingConstants {
  double a1 = 1.0;
  double a2 = 1.0;
  double a3 = 1.0;
  double a4 = 1.0;
};

/// Closed-form complete Bernstein function phi on (0, inf).
///
///   power(s)            phi(x) = x^s,                      0 < s <= 1
///   power_sum(s1, s2)   phi(x) = x^s1 + x^s2,              0 < s1 <= s2 <= 1
///   log_perturbed(s, b) phi(x) = x^s log(1 + x)^b,         s, b >= 0, 0 < s + b <= 1
///
/// The declared indices are those of the induced radial symbol
/// psi(r) = phi(r^2).
class BernsteinSymbol {
 public:
  enum class Family { power, power_sum, log_perturbed };

  static BernsteinSymbol power(double s);
  static BernsteinSymbol power_sum(double s1, double s2);
  static BernsteinSymbol log_perturbed(double s, double beta);

  double operator()(double x) const;

  /// phi(r^2) without forming r^2, so that radii up to the double range can
  /// be evaluated.
  double of_square(double r) const;

  Family family() const noexcept { return family_; }
  double first_parameter() const noexcept { return p1_; }
  double second_parameter() const noexcept { return p2_; }
  const ScalingIndices& indices() const noexcept { return indices_; }
  const ScalingConstants& constants() const noexcept { return constants_; }
  std::string describe() const;

 private:
  BernsteinSymbol(Family family, double p1, double p2);

  Family family_;
  double p1_;
  double p2_;
  ScalingIndices indices_;
  ScalingConstants constants_;
};

class RadialSymbol;
struct LiftedSymbol;
LiftedSymbol lift_symbol(const RadialSymbol& psi, double alpha);

/// Radial symbol psi(r) = c * phi(r^2)^e * r^q. The plain pairing with a
/// Bernstein function has c = e = 1, q = 0; lift_symbol produces e = 1/2 and
/// q = 1 / (2 alpha). c = 0 gives the zero symbol.
class RadialSymbol {
 public:
  explicit RadialSymbol(BernsteinSymbol phi);
  static RadialSymbol zero();

  double operator()(double r) const;

  const BernsteinSymbol& bernstein() const noexcept { return phi_; }
  ScalingIndices indices() const;
  bool is_zero() const noexcept { return coefficient_ == 0.0; }
  double outer_exponent() const noexcept { return exponent_; }
  double extra_power() const noexcept { return extra_power_; }
  std::string describe() const;

 private:
  friend LiftedSymbol lift_symbol(const RadialSymbol& psi, double alpha);

  BernsteinSymbol phi_;
  double coefficient_ = 1.0;
  double exponent_ = 1.0;
  double extra_power_ = 0.0;
};

struct ExponentParams {
  int n = 1;
  double d = 1.0;
  double alpha = 1.0;

  /// Throws ParameterError unless 0 < d <= n and alpha > 0.
  void validate() const;
};

struct BernsteinBoundsReport {
  double max_violation = 0.0;
  double worst_lambda = 0.0;
  double worst_r = 0.0;
  std::size_t evaluations = 0;
};

/// Largest relative violation of 1 ^ l <= phi(l r) / phi(r) <= 1 v l over the
/// product grid.
BernsteinBoundsReport check_bernstein_bounds(const BernsteinSymbol& phi,
                                             std::span<const double> lambdas,
                                             std::span<const double> rs);

enum class ScalingRegime { large_argument, small_argument };

struct IndexEstimate {
  double lo = 0.0;
  double hi = 0.0;
};

/// Extremes of log(psi(l t) / psi(t)) / (2 log l) over l > 1 in the grid and
/// t in the regime (t >= 1 for large_argument, t < 1 for small_argument).
IndexEstimate estimate_scaling_indices(const RadialSymbol& psi, ScalingRegime regime,
                                       std::span<const double> lambdas,
                                       std::span<const double> ts);

/// Same with the default grids: 64 log-spaced l in [1, 1e3], 64 log-spaced t
/// in [1, 1e3] or [1e-3, 1).
IndexEstimate estimate_scaling_indices(const RadialSymbol& psi, ScalingRegime regime);

/// (n - d)/2 < alpha delta1 <= alpha (delta2 v delta4) < (n - d)/2 + 1
bool check_trace_exponents(const ExponentParams& params, const ScalingIndices& indices);
bool check_trace_exponents(const ExponentParams& params, const BernsteinSymbol& phi);

struct LiftedSymbol {
  RadialSymbol psi;
  double alpha;
};

/// psi~(r) = psi(r)^{1/2} r^{1/alpha~}, alpha~ = 2 alpha, with indices mapped
/// to delta_i / 2 + 1 / (4 alpha). Requires alpha > 1/2.
LiftedSymbol lift_symbol(const RadialSymbol& psi, double alpha);

struct Bracket {
  double lo = 1e-12;
  double hi = 1e12;
};

/// r with psi(r) = y, by bisection in log r until |psi(r) - y| <= rtol * y.
double invert_radial(const RadialSymbol& psi, double y, Bracket bracket = {},
                     double rtol = 1e-10);

std::vector<double> log_grid(double lo, double hi, std::size_t count);

}  // namespace tracekit
