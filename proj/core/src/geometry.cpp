#include "tracekit/geometry.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "tracekit/errors.hpp"

namespace tracekit {

namespace {

void require_dimension(int n) {
  if (n < 1 || n > kMaxDimension) throw ParameterError("ambient dimension must be 1, 2 or 3");
}

// Distance between intervals [a, b] and [c, e].
double interval_gap(double a, double b, double c, double e) {
  if (b < c) return c - b;
  if (e < a) return a - e;
  return 0.0;
}

}  // namespace

double distance(const Point& a, const Point& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

bool Box::contains(const Point& x) const {
  for (int i = 0; i < n; ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  }
  return true;
}

DSet DSet::point(const Point& p, int n) {
  require_dimension(n);
  DSet D;
  D.kind_ = Kind::point;
  D.n_ = n;
  D.d_ = 0.0;
  D.p_ = {};
  for (int i = 0; i < n; ++i) D.p_[i] = p[i];
  return D;
}

DSet DSet::flat(int n, int m, double lo, double hi) {
  require_dimension(n);
  if (m < 1 || m > n) throw ParameterError("flat dimension must lie in [1, n]");
  if (!(lo < hi)) throw ParameterError("flat needs lo < hi");
  DSet D;
  D.kind_ = Kind::flat;
  D.n_ = n;
  D.m_ = m;
  D.d_ = m;
  D.lo_ = lo;
  D.hi_ = hi;
  return D;
}

DSet DSet::cube(int n, double lo, double hi) { return flat(n, n, lo, hi); }

DSet DSet::segment(int n, double lo, double hi) { return flat(n, 1, lo, hi); }

DSet DSet::cantor(double rho, int branches, int n, double lo, double hi) {
  require_dimension(n);
  if (!(rho > 0.0 && rho < 1.0)) throw ParameterError("cantor ratio must lie in (0, 1)");
  if (branches < 2) throw ParameterError("cantor set needs at least two branches");
  if (!(branches * rho < 1.0)) throw ParameterError("cantor branches overlap: need b rho < 1");
  if (!(lo < hi)) throw ParameterError("cantor set needs lo < hi");
  DSet D;
  D.kind_ = Kind::cantor;
  D.n_ = n;
  D.rho_ = rho;
  D.b_ = branches;
  D.d_ = std::log(static_cast<double>(branches)) / std::log(1.0 / rho);
  D.lo_ = lo;
  D.hi_ = hi;
  return D;
}

DSet DSet::embedded() const {
  if (n_ >= kMaxDimension) throw ParameterError("cannot embed beyond three dimensions");
  DSet D = *this;
  D.n_ = n_ + 1;
  return D;
}

Box DSet::bounds() const {
  Box box;
  box.n = n_;
  switch (kind_) {
    case Kind::point:
      box.lo = p_;
      box.hi = p_;
      break;
    case Kind::flat:
      for (int i = 0; i < m_; ++i) {
        box.lo[i] = lo_;
        box.hi[i] = hi_;
      }
      break;
    case Kind::cantor:
      box.lo[0] = lo_;
      box.hi[0] = hi_;
      break;
  }
  return box;
}

std::string DSet::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::point: os << "point(n=" << n_ << ")"; break;
    case Kind::flat: os << "flat(n=" << n_ << ",m=" << m_ << ",[" << lo_ << "," << hi_ << "])"; break;
    case Kind::cantor:
      os << "cantor(n=" << n_ << ",rho=" << rho_ << ",b=" << b_ << ",[" << lo_ << "," << hi_
         << "])";
      break;
  }
  return os.str();
}

double DSet::branch_offset(int i) const {
  return static_cast<double>(i) * (1.0 - rho_) / static_cast<double>(b_ - 1);
}

double DSet::distance(const Point& x) const { return distance_bounds(x).upper; }

DistanceBounds DSet::distance_bounds(const Point& x) const {
  Box box;
  box.n = n_;
  box.lo = x;
  box.hi = x;
  return distance_bounds(box);
}

DistanceBounds DSet::distance_bounds(const Box& box) const {
  if (box.n != n_) throw ParameterError("box dimension does not match the set");
  if (kind_ == Kind::point || kind_ == Kind::flat) {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
      double g = 0.0;
      if (kind_ == Kind::point) {
        g = interval_gap(box.lo[i], box.hi[i], p_[i], p_[i]);
      } else if (i < m_) {
        g = interval_gap(box.lo[i], box.hi[i], lo_, hi_);
      } else {
        g = interval_gap(box.lo[i], box.hi[i], 0.0, 0.0);
      }
      s += g * g;
    }
    const double dist = std::sqrt(s);
    return {dist, dist};
  }

  // Cantor set: branch and bound over cells [a, a + L] whose endpoints lie in
  // the set.
  double perp2 = 0.0;
  for (int i = 1; i < n_; ++i) {
    const double g = interval_gap(box.lo[i], box.hi[i], 0.0, 0.0);
    perp2 += g * g;
  }
  auto to_point = [&](double t) {
    const double g = interval_gap(box.lo[0], box.hi[0], t, t);
    return std::sqrt(g * g + perp2);
  };
  auto to_cell = [&](double a, double len) {
    const double g = interval_gap(box.lo[0], box.hi[0], a, a + len);
    return std::sqrt(g * g + perp2);
  };

  const double width = hi_ - lo_;
  const double floor_len = 1e-13 * width;
  double best = std::min(to_point(lo_), to_point(hi_));
  double leaf_lower = std::numeric_limits<double>::infinity();
  struct Cell {
    double a;
    double len;
  };
  std::vector<Cell> stack{{lo_, width}};
  while (!stack.empty()) {
    const Cell cell = stack.back();
    stack.pop_back();
    const double lower = to_cell(cell.a, cell.len);
    if (lower >= best) continue;
    if (cell.len < floor_len) {
      leaf_lower = std::min(leaf_lower, lower);
      continue;
    }
    const double child = cell.len * rho_;
    for (int i = b_ - 1; i >= 0; --i) {
      const double a = cell.a + branch_offset(i) * cell.len;
      best = std::min({best, to_point(a), to_point(a + child)});
      stack.push_back({a, child});
    }
  }
  return {std::min(best, leaf_lower), best};
}

double DMeasureQuadrature::total_mass() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

DMeasureQuadrature measure_quadrature(const DSet& D, int depth, std::size_t node_cap) {
  if (depth < 1) throw ParameterError("quadrature depth must be at least 1");
  DMeasureQuadrature q;
  q.n = D.ambient();
  q.depth = depth;

  switch (D.kind()) {
    case DSet::Kind::point:
      q.nodes.push_back(D.anchor());
      q.weights.push_back(1.0);
      q.spacing = 0.0;
      return q;

    case DSet::Kind::flat: {
      const int m = D.flat_dimension();
      if (depth > 40) throw ResourceError("flat quadrature depth too large");
      const std::size_t per_axis = (std::size_t{1} << depth) + 1;
      const double count = std::pow(static_cast<double>(per_axis), m);
      if (count > static_cast<double>(node_cap)) {
        std::ostringstream os;
        os << "quadrature would need " << count << " nodes (cap " << node_cap << ")";
        throw ResourceError(os.str());
      }
      const double h = (D.hi() - D.lo()) / std::exp2(depth);
      q.spacing = h;
      const std::size_t total = static_cast<std::size_t>(count);
      q.nodes.reserve(total);
      q.weights.reserve(total);
      std::array<std::size_t, 3> idx{};
      for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        Point x{};
        double w = 1.0;
        for (int i = m - 1; i >= 0; --i) {
          idx[i] = rest % per_axis;
          rest /= per_axis;
          x[i] = idx[i] + 1 == per_axis ? D.hi() : D.lo() + h * static_cast<double>(idx[i]);
          w *= (idx[i] == 0 || idx[i] + 1 == per_axis) ? 0.5 * h : h;
        }
        q.nodes.push_back(x);
        q.weights.push_back(w);
      }
      return q;
    }

    case DSet::Kind::cantor: {
      const double count = std::pow(static_cast<double>(D.branches()), depth);
      if (count > static_cast<double>(node_cap)) {
        std::ostringstream os;
        os << "quadrature would need " << count << " nodes (cap " << node_cap << ")";
        throw ResourceError(os.str());
      }
      const std::size_t total = static_cast<std::size_t>(count);
      const double len = (D.hi() - D.lo()) * std::pow(D.ratio(), depth);
      const double w = 1.0 / count;
      q.spacing = len;
      q.nodes.reserve(total);
      q.weights.assign(total, w);
      // Left endpoints generated level by level keep the natural ordering.
      std::vector<double> left{D.lo()};
      double cell = D.hi() - D.lo();
      for (int level = 0; level < depth; ++level) {
        std::vector<double> next;
        next.reserve(left.size() * static_cast<std::size_t>(D.branches()));
        for (double a : left) {
          for (int i = 0; i < D.branches(); ++i) next.push_back(a + D.branch_offset(i) * cell);
        }
        cell *= D.ratio();
        left.swap(next);
      }
      for (double a : left) {
        Point x{};
        x[0] = a + 0.5 * len;
        q.nodes.push_back(x);
      }
      return q;
    }
  }
  return q;
}

NodeIndex::NodeIndex(const DMeasureQuadrature& quad) : quad_(&quad) {
  order_.resize(quad.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return quad.nodes[a][0] < quad.nodes[b][0];
  });
  keys_.resize(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) keys_[i] = quad.nodes[order_[i]][0];
}

double NodeIndex::ball_mass(const Point& center, double radius, bool open) const {
  double mass = 0.0;
  for_each_in_ball(center, radius, open, [&](std::size_t m) { mass += quad_->weights[m]; });
  return mass;
}

DMeasureConstants verify_d_measure(const DSet& D, const DMeasureQuadrature& quad,
                                   std::span<const Point> centers, std::span<const double> radii) {
  if (centers.empty() || radii.empty()) throw ParameterError("need at least one center and radius");
  for (double r : radii) {
    if (!(r > 0.0 && r <= 1.0)) throw ParameterError("radii must lie in (0, 1]");
    if (r < quad.spacing) {
      std::ostringstream os;
      os << "radius " << r << " is below the quadrature spacing " << quad.spacing;
      throw ParameterError(os.str());
    }
  }
  for (const Point& x : centers) {
    if (D.distance(x) > quad.spacing + 1e-12) throw DomainError("ball center does not lie on D");
  }
  const NodeIndex index(quad);
  DMeasureConstants c{std::numeric_limits<double>::infinity(), 0.0};
  for (const Point& x : centers) {
    for (double r : radii) {
      const double ratio = index.ball_mass(x, r) / std::pow(r, D.dimension());
      c.c1 = std::min(c.c1, ratio);
      c.c2 = std::max(c.c2, ratio);
    }
  }
  return c;
}

std::vector<Point> sample_points(const DSet& D, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point> out(count);
  switch (D.kind()) {
    case DSet::Kind::point:
      std::fill(out.begin(), out.end(), D.anchor());
      break;
    case DSet::Kind::flat: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (Point& x : out) {
        x = {};
        for (int i = 0; i < D.flat_dimension(); ++i) x[i] = D.lo() + (D.hi() - D.lo()) * unit(rng);
      }
      break;
    }
    case DSet::Kind::cantor: {
      std::uniform_int_distribution<int> digit(0, D.branches() - 1);
      for (Point& x : out) {
        x = {};
        double pos = D.lo();
        double cell = D.hi() - D.lo();
        while (cell > 1e-15 * (D.hi() - D.lo())) {
          pos += D.branch_offset(digit(rng)) * cell;
          cell *= D.ratio();
        }
        x[0] = pos;
      }
      break;
    }
  }
  return out;
}

}  // namespace tracekit
