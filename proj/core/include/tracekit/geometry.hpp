#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tracekit {

/// Points in R^n for n <= 3; unused trailing coordinates are zero.
using Point = std::array<double, 3>;

inline constexpr int kMaxDimension = 3;

double distance(const Point& a, const Point& b, int n);

/// Axis-aligned box [lo_i, hi_i] in the first n coordinates.
struct Box {
  int n = 1;
  Point lo{};
  Point hi{};

  bool contains(const Point& x) const;
  double side(int axis) const { return hi[axis] - lo[axis]; }
};

/// Lower and upper bound on a distance; equal when the distance is exact.
struct DistanceBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Closed d-sets in R^n:
///   point    a single point, d = 0
///   flat     [lo, hi]^m x {0}^{n-m}, d = m (m = n is a cube, m = 1 a segment)
///   cantor   self-similar set on the first axis with b equally spaced
///            branches of ratio rho, d = log b / log(1/rho)
class DSet {
 public:
  enum class Kind { point, flat, cantor };

  static DSet point(const Point& p, int n);
  static DSet cube(int n, double lo = 0.0, double hi = 1.0);
  static DSet segment(int n, double lo = 0.0, double hi = 1.0);
  static DSet flat(int n, int m, double lo, double hi);
  static DSet cantor(double rho, int branches, int n = 1, double lo = 0.0, double hi = 1.0);

  /// The same set viewed as D x {0} in R^{n+1}.
  DSet embedded() const;

  Kind kind() const noexcept { return kind_; }
  int ambient() const noexcept { return n_; }
  double dimension() const noexcept { return d_; }
  Box bounds() const;
  std::string describe() const;

  int flat_dimension() const noexcept { return m_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double ratio() const noexcept { return rho_; }
  int branches() const noexcept { return b_; }
  const Point& anchor() const noexcept { return p_; }

  /// Offset of branch i inside a unit cell (cantor only).
  double branch_offset(int i) const;

  double distance(const Point& x) const;
  DistanceBounds distance_bounds(const Point& x) const;
  /// Distance between the box and the set.
  DistanceBounds distance_bounds(const Box& box) const;

 private:
  DSet() = default;

  Kind kind_ = Kind::point;
  int n_ = 1;
  double d_ = 0.0;
  int m_ = 0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double rho_ = 0.0;
  int b_ = 0;
  Point p_{};
};

struct DMeasureQuadrature {
  int n = 1;
  int depth = 0;
  /// Node spacing: lattice step for flats, cell length for cantor sets, 0 for a point.
  double spacing = 0.0;
  std::vector<Point> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
  double total_mass() const;
};

inline constexpr std::size_t kDefaultNodeCap = 200000;

/// Flats: trapezoid lattice with step (hi - lo) / 2^depth.
/// Cantor: centers of the b^depth cells, each of mass b^-depth.
/// Point: a single node of unit mass.
DMeasureQuadrature measure_quadrature(const DSet& D, int depth,
                                      std::size_t node_cap = kDefaultNodeCap);

/// Nodes sorted along the first axis for ball queries.
class NodeIndex {
 public:
  explicit NodeIndex(const DMeasureQuadrature& quad);

  /// Calls fn(node_index) for every node with |x_m - center| <= radius (closed ball)
  /// or < radius when open is set.
  template <class Fn>
  void for_each_in_ball(const Point& center, double radius, bool open, Fn&& fn) const;

  double ball_mass(const Point& center, double radius, bool open = false) const;

  const DMeasureQuadrature& quadrature() const noexcept { return *quad_; }

 private:
  const DMeasureQuadrature* quad_;
  std::vector<std::size_t> order_;
  std::vector<double> keys_;
};

struct DMeasureConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// c1 = min, c2 = max of mu(B(x, r)) / r^d over centers x and radii r, with mu
/// the quadrature measure and B closed.
DMeasureConstants verify_d_measure(const DSet& D, const DMeasureQuadrature& quad,
                                   std::span<const Point> centers, std::span<const double> radii);

/// Seeded points of D: mu-distributed for cantor sets, uniform for flats.
std::vector<Point> sample_points(const DSet& D, std::size_t count, std::uint64_t seed);

// ---------------------------------------------------------------------------

template <class Fn>
void NodeIndex::for_each_in_ball(const Point& center, double radius, bool open, Fn&& fn) const {
  const auto begin = std::lower_bound(keys_.begin(), keys_.end(), center[0] - radius);
  const auto end = std::upper_bound(keys_.begin(), keys_.end(), center[0] + radius);
  const int n = quad_->n;
  const double r2 = radius * radius;
  for (auto it = begin; it != end; ++it) {
    const std::size_t m = order_[static_cast<std::size_t>(it - keys_.begin())];
    const Point& x = quad_->nodes[m];
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = x[i] - center[i];
      s += t * t;
    }
    if (open ? s < r2 : s <= r2) fn(m);
  }
}

}  // namespace tracekit
