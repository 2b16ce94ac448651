#pragma once

#include <span>
#include <string>

#include "tracekit/quadrature.hpp"
#include "tracekit/symbols.hpp"

namespace tracekit {

// Radial jump densities j(r) of isotropic Levy processes in R^n.
//   stable             j(r) = r^{-n-2s}
//   truncated_stable   j(r) = r^{-n-2s} for r < cutoff, 0 beyond
//   damped_stable      j(r) = r^{-n-2s} / (1 + r)
class LevyDensity {
 public:
  enum class Kind { stable, truncated_stable, damped_stable };

  static LevyDensity stable(double s, int n = 1);
  static LevyDensity truncated_stable(double s, double cutoff = 1.0, int n = 1);
  static LevyDensity damped_stable(double s, int n = 1);

  double operator()(double r) const;

  Kind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return n_; }
  double index() const noexcept { return s_; }
  // Radius where j jumps to 0; 0 for densities without one.
  double breakpoint() const noexcept { return kind_ == Kind::truncated_stable ? cutoff_ : 0.0; }
  bool compact_support() const noexcept { return kind_ == Kind::truncated_stable; }
  std::string describe() const;

 private:
  LevyDensity(Kind kind, double s, double cutoff, int n);

  Kind kind_;
  double s_;
  double cutoff_;
  int n_;
};

struct LevyDensityReport {
  bool non_increasing = true;
  // max of j(r) / j(r + 1) over grid points r >= 1; infinite when j vanishes.
  double c1 = 0.0;
  // int_0^inf (1 ^ s^2) j(s) ds.
  double small_jump_integral = 0.0;
};

LevyDensityReport levy_density_report(const LevyDensity& j, std::span<const double> r_grid);

// psi(xi) = 2 int_0^inf (1 - cos(xi x)) j(x) dx for n = 1. Throws NumericError
// when the quadrature error estimate exceeds rtol * psi.
double psi_from_density(const LevyDensity& j, double xi, double rtol = 1e-8);

struct RatioRange {
  double min = 0.0;
  double max = 0.0;
};

// Extremes of j(r) r^n / phi(r^{-2}) over the grid, which must lie in (0, R).
RatioRange check_density_kernel_equiv(const LevyDensity& j, const BernsteinSymbol& phi, double R,
                                      std::span<const double> r_grid);

// Bessel-type potential K(x) = (1/pi) int_0^inf cos(x xi) (1 + psi(xi))^{-alpha/2} dxi
// on the line. Requires 2 alpha delta1 > 1 so that the multiplier is integrable.
class KernelProfile {
 public:
  KernelProfile(RadialSymbol psi, double alpha, double rtol = 1e-10);

  double operator()(double x) const { return evaluate(x).value; }
  quad::Result evaluate(double x) const;

  // Centered difference with step 1e-3 x.
  double derivative(double x) const;

  const RadialSymbol& symbol() const noexcept { return psi_; }
  double alpha() const noexcept { return alpha_; }
  int dimension() const noexcept { return 1; }

 private:
  RadialSymbol psi_;
  double alpha_;
  double rtol_;
  double knee_;
};

double bessel_kernel(const RadialSymbol& psi, double alpha, double x);

struct KernelDecayConstants {
  double c0 = 0.0;
  double c1 = 0.0;
};

// C0 = max |K(x)| x^n phi(x^{-2})^{alpha/2}, C1 = max |K'(x)| x^{n+1} phi(x^{-2})^{alpha/2}
// over x_grid in (0, 1]. Requires alpha (delta2 v delta4) < n.
KernelDecayConstants check_kernel_decay(const RadialSymbol& psi, double alpha,
                                        const BernsteinSymbol& phi,
                                        std::span<const double> x_grid);

// (K * g)(x) for g(y) = exp(-(y - center)^2 / (2 width^2)), via its closed-form
// transform.
double gaussian_bessel_potential(const RadialSymbol& psi, double alpha, double center,
                                 double width, double x);

}  // namespace tracekit
