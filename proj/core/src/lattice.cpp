#include "tracekit/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tracekit/errors.hpp"
#include "tracekit/parallel.hpp"

namespace tracekit {

namespace {

std::vector<double> signed_binomials(int k) {
  std::vector<double> c(static_cast<std::size_t>(k) + 1);
  double b = 1.0;
  for (int j = 0; j <= k; ++j) {
    c[static_cast<std::size_t>(j)] = ((k - j) % 2 == 0 ? 1.0 : -1.0) * b;
    b = b * (k - j) / (j + 1);
  }
  return c;
}

}  // namespace

LatticeSpec LatticeSpec::covering(const Box& box, double h) {
  if (!(h > 0.0)) throw ParameterError("lattice spacing must be positive");
  LatticeSpec spec;
  spec.n = box.n;
  spec.spacing = h;
  spec.origin = {};
  for (int a = 0; a < box.n; ++a) {
    const double steps = box.side(a) / h;
    const double rounded = std::round(steps);
    if (!(rounded >= 1.0) || std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
      throw ParameterError("lattice box sides must be positive multiples of the spacing");
    }
    spec.origin[a] = box.lo[a];
    spec.counts[a] = static_cast<std::size_t>(rounded) + 1;
  }
  return spec;
}

double LatticeSpec::cell_volume() const { return std::pow(spacing, n); }

Box LatticeSpec::bounds() const {
  Box b;
  b.n = n;
  for (int a = 0; a < n; ++a) {
    b.lo[a] = origin[a];
    b.hi[a] = origin[a] + spacing * static_cast<double>(counts[a] - 1);
  }
  return b;
}

Index3 LatticeSpec::unravel(std::size_t linear) const {
  Index3 idx{};
  idx[2] = static_cast<std::int64_t>(linear % counts[2]);
  linear /= counts[2];
  idx[1] = static_cast<std::int64_t>(linear % counts[1]);
  idx[0] = static_cast<std::int64_t>(linear / counts[1]);
  return idx;
}

std::size_t LatticeSpec::ravel(const Index3& idx) const {
  return (static_cast<std::size_t>(idx[0]) * counts[1] + static_cast<std::size_t>(idx[1])) *
             counts[2] +
         static_cast<std::size_t>(idx[2]);
}

bool LatticeSpec::contains(const Index3& idx) const {
  for (int a = 0; a < 3; ++a) {
    if (idx[a] < 0 || idx[a] >= static_cast<std::int64_t>(counts[a])) return false;
  }
  return true;
}

Point LatticeSpec::point(const Index3& idx) const {
  Point x{};
  for (int a = 0; a < n; ++a) x[a] = origin[a] + spacing * static_cast<double>(idx[a]);
  return x;
}

Point LatticeSpec::point(std::size_t linear) const { return point(unravel(linear)); }

bool LatticeSpec::same_grid(const LatticeSpec& other) const {
  return n == other.n && spacing == other.spacing && origin == other.origin &&
         counts == other.counts;
}

GaussianProfile GaussianProfile::single(int n, double width, const Point& center, double coef) {
  if (!(width > 0.0)) throw ParameterError("gaussian width must be positive");
  GaussianProfile g;
  g.n = n;
  g.terms.push_back({coef, center, width});
  return g;
}

double GaussianProfile::operator()(const Point& x) const {
  double sum = 0.0;
  for (const Term& t : terms) {
    const double r = distance(x, t.center, n);
    sum += t.coef * std::exp(-0.5 * r * r / (t.width * t.width));
  }
  return sum;
}

double GaussianProfile::l2_norm() const {
  double sum = 0.0;
  for (const Term& a : terms) {
    for (const Term& b : terms) {
      const double p2 = a.width * a.width;
      const double q2 = b.width * b.width;
      const double r = distance(a.center, b.center, n);
      sum += a.coef * b.coef * std::pow(2.0 * std::numbers::pi * p2 * q2 / (p2 + q2), 0.5 * n) *
             std::exp(-0.5 * r * r / (p2 + q2));
    }
  }
  return std::sqrt(std::max(0.0, sum));
}

GaussianProfile GaussianProfile::scaled(double c) const {
  GaussianProfile g = *this;
  for (Term& t : g.terms) t.coef *= c;
  return g;
}

GaussianProfile GaussianProfile::plus(const GaussianProfile& other) const {
  if (other.n != n) throw ParameterError("profile dimensions differ");
  GaussianProfile g = *this;
  g.terms.insert(g.terms.end(), other.terms.begin(), other.terms.end());
  return g;
}

LatticeFunction::LatticeFunction(LatticeSpec spec, std::vector<double> values,
                                 std::optional<GaussianProfile> profile)
    : spec_(spec), values_(std::move(values)), profile_(std::move(profile)) {
  if (values_.size() != spec_.size()) throw ParameterError("value count does not match lattice");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("lattice values must be finite");
  }
  if (profile_ && profile_->n != spec_.n) throw ParameterError("profile dimension mismatch");
}

LatticeFunction LatticeFunction::sample(const LatticeSpec& spec, const GaussianProfile& profile) {
  std::vector<double> v(spec.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = profile(spec.point(i));
  return {spec, std::move(v), profile};
}

LatticeFunction LatticeFunction::sample(const LatticeSpec& spec,
                                        const std::function<double(const Point&)>& f) {
  std::vector<double> v(spec.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(spec.point(i));
  return {spec, std::move(v)};
}

double LatticeFunction::at(const Index3& idx) const {
  return spec_.contains(idx) ? values_[spec_.ravel(idx)] : 0.0;
}

double LatticeFunction::l2_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s * spec_.cell_volume());
}

double LatticeFunction::boundary_magnitude(double margin) const {
  double worst = 0.0;
  const Box b = spec_.bounds();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Point x = spec_.point(i);
    bool near = false;
    for (int a = 0; a < spec_.n && !near; ++a) {
      near = x[a] - b.lo[a] < margin || b.hi[a] - x[a] < margin;
    }
    if (near) worst = std::max(worst, std::abs(values_[i]));
  }
  return worst;
}

LatticeFunction LatticeFunction::scaled(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= c;
  std::optional<GaussianProfile> p;
  if (profile_) p = profile_->scaled(c);
  return {spec_, std::move(v), std::move(p)};
}

LatticeFunction LatticeFunction::plus(const LatticeFunction& other) const {
  if (!spec_.same_grid(other.spec_)) throw ParameterError("lattice functions live on different grids");
  std::vector<double> v = values_;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
  std::optional<GaussianProfile> p;
  if (profile_ && other.profile_) p = profile_->plus(*other.profile_);
  return {spec_, std::move(v), std::move(p)};
}

Index3 shift_steps(const LatticeSpec& spec, const Point& shift) {
  Index3 steps{};
  for (int a = 0; a < spec.n; ++a) {
    const double s = shift[a] / spec.spacing;
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-9 * std::max(1.0, std::abs(s))) {
      throw ParameterError("shift is not a multiple of the lattice spacing");
    }
    steps[a] = static_cast<std::int64_t>(r);
  }
  for (int a = spec.n; a < 3; ++a) {
    if (shift[a] != 0.0) throw ParameterError("shift has components beyond the lattice dimension");
  }
  return steps;
}

namespace {

struct DifferenceRange {
  Index3 lo{};
  Index3 hi{};  // inclusive; empty when hi < lo on some axis
};

DifferenceRange difference_range(const LatticeSpec& spec, const Index3& s, int k,
                                 DifferenceDomain domain) {
  DifferenceRange r;
  for (int a = 0; a < 3; ++a) {
    const std::int64_t n = static_cast<std::int64_t>(spec.counts[a]);
    const std::int64_t ks = k * s[a];
    if (domain == DifferenceDomain::zero_extended) {
      r.lo[a] = -std::max<std::int64_t>(0, ks);
      r.hi[a] = n - 1 - std::min<std::int64_t>(0, ks);
    } else {
      r.lo[a] = std::max<std::int64_t>(0, -ks);
      r.hi[a] = n - 1 - std::max<std::int64_t>(0, ks);
    }
  }
  return r;
}

template <class Fn>
void for_each_difference(const LatticeFunction& u, const Index3& s, int k, DifferenceDomain domain,
                         Fn&& fn) {
  const auto coef = signed_binomials(k);
  const DifferenceRange r = difference_range(u.spec(), s, k, domain);
  Index3 i{};
  for (i[0] = r.lo[0]; i[0] <= r.hi[0]; ++i[0]) {
    for (i[1] = r.lo[1]; i[1] <= r.hi[1]; ++i[1]) {
      for (i[2] = r.lo[2]; i[2] <= r.hi[2]; ++i[2]) {
        double v = 0.0;
        for (int j = 0; j <= k; ++j) {
          const Index3 p{i[0] + j * s[0], i[1] + j * s[1], i[2] + j * s[2]};
          v += coef[static_cast<std::size_t>(j)] * u.at(p);
        }
        fn(i, v);
      }
    }
  }
}

}  // namespace

LatticeFunction kth_difference(const LatticeFunction& u, const Point& shift, int k,
                               DifferenceDomain domain) {
  if (k < 1) throw ParameterError("difference order must be at least 1");
  const Index3 s = shift_steps(u.spec(), shift);
  const DifferenceRange r = difference_range(u.spec(), s, k, domain);
  LatticeSpec out = u.spec();
  for (int a = 0; a < 3; ++a) {
    const std::int64_t count = r.hi[a] - r.lo[a] + 1;
    if (count < 1) throw ParameterError("interior difference leaves no lattice points");
    out.counts[a] = static_cast<std::size_t>(count);
    if (a < out.n) out.origin[a] = u.spec().origin[a] + u.spec().spacing * static_cast<double>(r.lo[a]);
  }
  std::vector<double> values(out.size());
  for_each_difference(u, s, k, domain, [&](const Index3& i, double v) {
    values[out.ravel({i[0] - r.lo[0], i[1] - r.lo[1], i[2] - r.lo[2]})] = v;
  });
  return {out, std::move(values)};
}

double difference_energy(const LatticeFunction& u, const Index3& steps, int k,
                         DifferenceDomain domain) {
  if (k < 1) throw ParameterError("difference order must be at least 1");
  double sum = 0.0;
  for_each_difference(u, steps, k, domain, [&](const Index3&, double v) { sum += v * v; });
  return sum * u.spec().cell_volume();
}

std::vector<Index3> half_shift_ball(const LatticeSpec& spec, double radius) {
  std::vector<Index3> out;
  const double h = spec.spacing;
  const std::int64_t R = static_cast<std::int64_t>(std::ceil(radius / h));
  const std::int64_t R1 = spec.n > 1 ? R : 0;
  const std::int64_t R2 = spec.n > 2 ? R : 0;
  for (std::int64_t a = -R; a <= R; ++a) {
    for (std::int64_t b = -R1; b <= R1; ++b) {
      for (std::int64_t c = -R2; c <= R2; ++c) {
        const bool positive = a > 0 || (a == 0 && (b > 0 || (b == 0 && c > 0)));
        if (!positive) continue;
        const double len = h * std::sqrt(static_cast<double>(a * a + b * b + c * c));
        if (len < radius) out.push_back({a, b, c});
      }
    }
  }
  return out;
}

double modulus_of_continuity(const LatticeFunction& u, int k, double t) {
  const double ts[1] = {t};
  return modulus_profile(u, k, ts).front();
}

std::vector<double> modulus_profile(const LatticeFunction& u, int k, std::span<const double> ts) {
  if (ts.empty()) return {};
  for (double t : ts) {
    if (!(t > 0.0)) throw ParameterError("modulus radius must be positive");
  }
  const double t_max = *std::max_element(ts.begin(), ts.end());
  const auto shifts = half_shift_ball(u.spec(), t_max);
  std::vector<double> norms(shifts.size());
  std::vector<double> lengths(shifts.size());
  parallel::for_each_index(
      shifts.size(),
      [&](std::size_t i) {
        norms[i] = std::sqrt(difference_energy(u, shifts[i], k));
        const auto& s = shifts[i];
        lengths[i] = u.spec().spacing *
                     std::sqrt(static_cast<double>(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]));
      },
      8);
  std::vector<double> out(ts.size(), 0.0);
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (std::size_t i = 0; i < shifts.size(); ++i) {
      if (lengths[i] < ts[j]) out[j] = std::max(out[j], norms[i]);
    }
  }
  return out;
}

}  // namespace tracekit
