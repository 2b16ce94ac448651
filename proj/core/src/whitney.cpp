#include "tracekit/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "tracekit/errors.hpp"

namespace tracekit {

namespace {

double bump_profile(double t) {
  const double q = 1.0 - t * t;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

double bump_slope(double t) {
  const double q = 1.0 - t * t;
  if (q <= 0.0) return 0.0;
  return std::exp(-1.0 / q) * (-2.0 * t / (q * q));
}

bool is_multiple(double x, double s) {
  const double k = x / s;
  return k == std::floor(k) && std::abs(k) < 9.0e15;
}

}  // namespace

Box WhitneyCube::box(int n) const {
  Box b;
  b.n = n;
  for (int i = 0; i < n; ++i) {
    b.lo[i] = static_cast<double>(index[i]) * side;
    b.hi[i] = b.lo[i] + side;
  }
  return b;
}

std::size_t WhitneyDecomposition::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = std::hash<int>{}(k.level);
  for (auto v : k.index) h = h * 1000003u ^ std::hash<std::int64_t>{}(v);
  return h;
}

WhitneyDecomposition WhitneyDecomposition::build(const DSet& D, const Box& bbox,
                                                 const WhitneyOptions& options) {
  const int n = D.ambient();
  if (bbox.n != n) throw ParameterError("bounding box dimension does not match the set");
  if (!(options.s_min > 0.0)) throw ParameterError("s_min must be positive");
  if (!(options.epsilon > 0.0 && options.epsilon < 0.25)) {
    throw ParameterError("epsilon must lie in (0, 1/4)");
  }
  const Box dbox = D.bounds();
  for (int i = 0; i < n; ++i) {
    if (!(bbox.lo[i] < dbox.lo[i] && dbox.hi[i] < bbox.hi[i])) {
      throw GeometryError("the set must lie in the interior of the bounding box");
    }
  }

  double s0 = 0.0;
  double min_side = bbox.side(0);
  for (int i = 1; i < n; ++i) min_side = std::min(min_side, bbox.side(i));
  for (int p = 30; p >= -40; --p) {
    const double s = std::ldexp(1.0, p);
    if (s > min_side) continue;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = is_multiple(bbox.lo[i], s) && is_multiple(bbox.hi[i], s);
    if (ok) {
      s0 = s;
      break;
    }
  }
  if (s0 == 0.0) throw GeometryError("bounding box corners are not dyadic multiples");
  if (s0 < options.s_min) throw ParameterError("s_min exceeds the top-level tile side");

  WhitneyDecomposition W;
  W.n_ = n;
  W.epsilon_ = options.epsilon;
  W.s_min_ = options.s_min;
  W.bbox_ = bbox;

  const int top_level = -static_cast<int>(std::lround(std::log2(s0)));
  std::array<std::int64_t, 3> first{}, count{1, 1, 1};
  for (int i = 0; i < n; ++i) {
    first[i] = static_cast<std::int64_t>(std::llround(bbox.lo[i] / s0));
    count[i] = static_cast<std::int64_t>(std::llround(bbox.side(i) / s0));
  }

  struct Item {
    int level;
    std::array<std::int64_t, 3> index;
  };
  std::vector<Item> stack;
  for (std::int64_t a = count[0] - 1; a >= 0; --a) {
    for (std::int64_t b = count[1] - 1; b >= 0; --b) {
      for (std::int64_t c = count[2] - 1; c >= 0; --c) {
        std::array<std::int64_t, 3> idx{first[0] + a, n > 1 ? first[1] + b : 0,
                                        n > 2 ? first[2] + c : 0};
        stack.push_back({top_level, idx});
      }
    }
  }

  const double root_n = std::sqrt(static_cast<double>(n));
  std::set<int> levels;
  while (!stack.empty()) {
    const Item item = stack.back();
    stack.pop_back();
    WhitneyCube q;
    q.level = item.level;
    q.index = item.index;
    q.side = std::ldexp(1.0, -item.level);
    q.diameter = root_n * q.side;
    for (int i = 0; i < n; ++i) q.center[i] = (static_cast<double>(q.index[i]) + 0.5) * q.side;
    q.dist = D.distance_bounds(q.box(n));
    const double l = q.diameter;

    if (q.dist.lower >= l && q.dist.upper <= 4.0 * l) {
      W.lookup_.emplace(Key{q.level, q.index}, W.cubes_.size());
      W.cubes_.push_back(q);
      levels.insert(q.level);
      if (W.cubes_.size() > options.cube_cap) {
        std::ostringstream os;
        os << "Whitney decomposition exceeds the cube cap " << options.cube_cap;
        throw ResourceError(os.str());
      }
    } else if (q.dist.lower < l) {
      if (0.5 * q.side < options.s_min) {
        W.uncovered_volume_ += std::pow(q.side, n);
        ++W.dropped_count_;
        continue;
      }
      const int child = item.level + 1;
      for (int corner = (1 << n) - 1; corner >= 0; --corner) {
        std::array<std::int64_t, 3> idx{};
        for (int i = 0; i < n; ++i) idx[i] = 2 * item.index[i] + ((corner >> (n - 1 - i)) & 1);
        stack.push_back({child, idx});
      }
    } else {
      W.exterior_.push_back(q);
    }
  }
  if (W.cubes_.empty()) {
    throw ParameterError("no Whitney cube could be certified; s_min is too large for this set");
  }
  W.levels_.assign(levels.begin(), levels.end());
  return W;
}

std::vector<std::size_t> WhitneyDecomposition::index_set() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cubes_.size(); ++i) {
    if (in_index_set(i)) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> WhitneyDecomposition::covering(const Point& x) const {
  std::vector<std::size_t> out;
  const int span = 1;
  for (int level : levels_) {
    const double side = std::ldexp(1.0, -level);
    const double half = 0.5 * (1.0 + epsilon_) * side;
    std::array<std::int64_t, 3> base{};
    for (int i = 0; i < n_; ++i) base[i] = static_cast<std::int64_t>(std::floor(x[i] / side));
    const int reach = n_ > 1 ? span : 0;
    const int reach3 = n_ > 2 ? span : 0;
    for (int a = -span; a <= span; ++a) {
      for (int b = -reach; b <= reach; ++b) {
        for (int c = -reach3; c <= reach3; ++c) {
          Key key{level, {base[0] + a, n_ > 1 ? base[1] + b : 0, n_ > 2 ? base[2] + c : 0}};
          const auto it = lookup_.find(key);
          if (it == lookup_.end()) continue;
          const WhitneyCube& q = cubes_[it->second];
          bool inside = true;
          for (int i = 0; i < n_ && inside; ++i) inside = std::abs(x[i] - q.center[i]) < half;
          if (inside) out.push_back(it->second);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t WhitneyDecomposition::containing(const Point& x) const {
  for (int level : levels_) {
    const double side = std::ldexp(1.0, -level);
    std::array<std::int64_t, 3> base{};
    for (int i = 0; i < n_; ++i) base[i] = static_cast<std::int64_t>(std::floor(x[i] / side));
    for (int corner = 0; corner < (1 << n_); ++corner) {
      Key key{level, base};
      for (int i = 0; i < n_; ++i) key.index[i] -= (corner >> i) & 1;
      const auto it = lookup_.find(key);
      if (it == lookup_.end()) continue;
      if (cubes_[it->second].box(n_).contains(x)) return it->second;
    }
  }
  return cubes_.size();
}

PartitionOfUnity::PartitionOfUnity(const WhitneyDecomposition& W) : W_(&W) {}

double PartitionOfUnity::bump(std::size_t i, const Point& x) const {
  const WhitneyCube& q = W_->cube(i);
  const double half = W_->expanded_half(i);
  double z = 1.0;
  for (int k = 0; k < W_->dimension(); ++k) z *= bump_profile((x[k] - q.center[k]) / half);
  return z;
}

std::vector<PartitionOfUnity::Term> PartitionOfUnity::evaluate(const Point& x) const {
  const auto cover = W_->covering(x);
  std::vector<Term> terms;
  terms.reserve(cover.size());
  double total = 0.0;
  for (std::size_t i : cover) {
    const double z = bump(i, x);
    if (z > 0.0) {
      terms.push_back({i, z});
      total += z;
    }
  }
  if (!(total > 0.0)) {
    std::ostringstream os;
    os << "point (" << x[0];
    for (int k = 1; k < W_->dimension(); ++k) os << ", " << x[k];
    os << ") is not covered by any expanded Whitney cube";
    throw CoverageError(os.str());
  }
  for (Term& t : terms) t.value /= total;
  return terms;
}

double PartitionOfUnity::value(std::size_t i, const Point& x) const {
  for (const Term& t : evaluate(x)) {
    if (t.cube == i) return t.value;
  }
  return 0.0;
}

Point PartitionOfUnity::gradient(std::size_t i, const Point& x) const {
  const int n = W_->dimension();
  const auto cover = W_->covering(x);
  double total = 0.0;
  Point total_grad{};
  double zi = 0.0;
  Point grad_i{};
  for (std::size_t k : cover) {
    const WhitneyCube& q = W_->cube(k);
    const double half = W_->expanded_half(k);
    std::array<double, 3> t{}, b{}, db{};
    for (int a = 0; a < n; ++a) {
      t[a] = (x[a] - q.center[a]) / half;
      b[a] = bump_profile(t[a]);
      db[a] = bump_slope(t[a]) / half;
    }
    double z = 1.0;
    for (int a = 0; a < n; ++a) z *= b[a];
    Point g{};
    for (int a = 0; a < n; ++a) {
      double p = db[a];
      for (int c = 0; c < n; ++c) {
        if (c != a) p *= b[c];
      }
      g[a] = p;
    }
    total += z;
    for (int a = 0; a < n; ++a) total_grad[a] += g[a];
    if (k == i) {
      zi = z;
      grad_i = g;
    }
  }
  if (!(total > 0.0)) throw CoverageError("gradient requested at an uncovered point");
  Point out{};
  for (int a = 0; a < n; ++a) out[a] = (grad_i[a] * total - zi * total_grad[a]) / (total * total);
  return out;
}

double PartitionOfUnity::max_second_derivative(std::size_t i, const Point& x) const {
  const int n = W_->dimension();
  const double eta = 1e-4 * W_->cube(i).side;
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    Point plus = x;
    Point minus = x;
    plus[a] += eta;
    minus[a] -= eta;
    const Point gp = gradient(i, plus);
    const Point gm = gradient(i, minus);
    for (int c = 0; c < n; ++c) worst = std::max(worst, std::abs(gp[c] - gm[c]) / (2.0 * eta));
  }
  return worst;
}

PartitionDiagnostics measure_partition(const PartitionOfUnity& pou, std::span<const Point> points,
                                       bool second_derivatives) {
  PartitionDiagnostics diag;
  diag.min_value = 1.0;
  const WhitneyDecomposition& W = pou.decomposition();
  const int n = W.dimension();
  for (const Point& x : points) {
    const auto terms = pou.evaluate(x);
    double sum = 0.0;
    for (const auto& t : terms) {
      sum += t.value;
      diag.min_value = std::min(diag.min_value, t.value);
      const Point g = pou.gradient(t.cube, x);
      double norm = 0.0;
      for (int a = 0; a < n; ++a) norm += g[a] * g[a];
      const double l = W.cube(t.cube).diameter;
      diag.gradient_constant = std::max(diag.gradient_constant, std::sqrt(norm) * l);
      if (second_derivatives) {
        diag.hessian_constant =
            std::max(diag.hessian_constant, pou.max_second_derivative(t.cube, x) * l * l);
      }
    }
    diag.max_sum_error = std::max(diag.max_sum_error, std::abs(sum - 1.0));
    diag.overlap = std::max(diag.overlap, W.covering(x).size());
    ++diag.samples;
  }
  return diag;
}

std::size_t overlap_number(const WhitneyDecomposition& W) {
  const int n = W.dimension();
  std::size_t best = 0;
  for (const WhitneyCube& q : W.cubes()) {
    const Box box = q.box(n);
    for (int corner = 0; corner < (1 << n); ++corner) {
      Point v{};
      for (int i = 0; i < n; ++i) v[i] = ((corner >> i) & 1) ? box.hi[i] : box.lo[i];
      best = std::max(best, W.covering(v).size());
    }
  }
  return best;
}

std::vector<Point> sample_covered_points(const WhitneyDecomposition& W, std::size_t count,
                                         std::uint64_t seed, double min_distance, const DSet* D) {
  std::mt19937_64 rng(seed);
  const Box& bbox = W.bbox();
  const int n = W.dimension();
  std::vector<std::uniform_real_distribution<double>> axis;
  for (int i = 0; i < n; ++i) axis.emplace_back(bbox.lo[i], bbox.hi[i]);
  std::vector<Point> out;
  out.reserve(count);
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * count + 1000) {
      throw ResourceError("could not draw enough covered sample points");
    }
    Point x{};
    for (int i = 0; i < n; ++i) x[i] = axis[static_cast<std::size_t>(i)](rng);
    if (W.containing(x) == W.size()) continue;
    if (D != nullptr && D->distance(x) <= min_distance) continue;
    out.push_back(x);
  }
  return out;
}

}  // namespace tracekit
