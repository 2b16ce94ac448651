#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tracekit/geometry.hpp"

namespace tracekit {

using Index3 = std::array<std::int64_t, 3>;

/// Regular grid origin + h * i, 0 <= i_a < counts[a], in the first n axes.
struct LatticeSpec {
  int n = 1;
  Point origin{};
  double spacing = 1.0;
  std::array<std::size_t, 3> counts{1, 1, 1};

  /// Lattice with step h covering box; box sides must be multiples of h.
  static LatticeSpec covering(const Box& box, double h);

  std::size_t size() const noexcept { return counts[0] * counts[1] * counts[2]; }
  double cell_volume() const;
  Box bounds() const;
  Point point(std::size_t linear) const;
  Point point(const Index3& idx) const;
  Index3 unravel(std::size_t linear) const;
  std::size_t ravel(const Index3& idx) const;
  bool contains(const Index3& idx) const;
  bool same_grid(const LatticeSpec& other) const;
};

/// sum_i coef_i exp(-|x - center_i|^2 / (2 width_i^2)): the test family with a
/// closed-form Fourier transform.
struct GaussianProfile {
  struct Term {
    double coef = 1.0;
    Point center{};
    double width = 1.0;
  };
  int n = 1;
  std::vector<Term> terms;

  static GaussianProfile single(int n, double width, const Point& center = {}, double coef = 1.0);

  double operator()(const Point& x) const;
  /// Exact L2(R^n) norm.
  double l2_norm() const;
  GaussianProfile scaled(double c) const;
  GaussianProfile plus(const GaussianProfile& other) const;
};

/// Samples on a lattice, extended by zero outside it.
class LatticeFunction {
 public:
  LatticeFunction(LatticeSpec spec, std::vector<double> values,
                  std::optional<GaussianProfile> profile = std::nullopt);

  static LatticeFunction sample(const LatticeSpec& spec, const GaussianProfile& profile);
  static LatticeFunction sample(const LatticeSpec& spec,
                                const std::function<double(const Point&)>& f);

  const LatticeSpec& spec() const noexcept { return spec_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }
  const std::optional<GaussianProfile>& profile() const noexcept { return profile_; }

  double at(const Index3& idx) const;
  /// Riemann-sum L2 norm.
  double l2_norm() const;
  /// Largest |u| within `margin` of the lattice boundary.
  double boundary_magnitude(double margin) const;

  LatticeFunction scaled(double c) const;
  LatticeFunction plus(const LatticeFunction& other) const;

 private:
  LatticeSpec spec_;
  std::vector<double> values_;
  std::optional<GaussianProfile> profile_;
};

enum class DifferenceDomain {
  zero_extended,  // all x where some u(x + j h) is nonzero; the lattice grows
  interior,       // only x with every x + j h on the lattice; the lattice shrinks
};

/// Converts a shift vector to lattice steps; throws ParameterError unless
/// every component is an integer multiple of the spacing.
Index3 shift_steps(const LatticeSpec& spec, const Point& shift);

/// Delta_h^k u = sum_j (-1)^{k-j} C(k, j) u(. + j h).
LatticeFunction kth_difference(const LatticeFunction& u, const Point& shift, int k,
                               DifferenceDomain domain = DifferenceDomain::zero_extended);

/// ||Delta_h^k u||^2 in L2(R^n) for a shift given in lattice steps.
double difference_energy(const LatticeFunction& u, const Index3& steps, int k,
                         DifferenceDomain domain = DifferenceDomain::zero_extended);

/// Lattice shifts h != 0 with |h| < radius, listed once per +-h pair (first
/// nonzero step positive).
std::vector<Index3> half_shift_ball(const LatticeSpec& spec, double radius);

/// max over lattice shifts 0 < |h| < t of ||Delta_h^k u||.
double modulus_of_continuity(const LatticeFunction& u, int k, double t);

/// Moduli at every t in ts (any order), nondecreasing in t.
std::vector<double> modulus_profile(const LatticeFunction& u, int k, std::span<const double> ts);

}  // namespace tracekit
