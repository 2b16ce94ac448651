#include "tracekit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tracekit/errors.hpp"
#include "tracekit/levy.hpp"
#include "tracekit/parallel.hpp"

namespace tracekit {

namespace {

void check_radii(std::span<const double> radii, double h) {
  if (radii.empty()) throw ParameterError("radius schedule is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) {
      throw ParameterError("ball radii must be positive and finite");
    }
    if (i > 0 && !(radii[i] < radii[i - 1])) {
      throw ParameterError("ball radii must be strictly decreasing");
    }
  }
  if (radii.back() < 2.0 * h * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "smallest ball radius " << radii.back() << " is below twice the lattice spacing " << h;
    throw ResolutionError(os.str());
  }
}

// Visits origin + h * i for every i with |origin + h i - x| <= r.
template <class Fn>
void for_each_grid_point(int n, const Point& origin, double h, const Point& x, double r, Fn&& fn) {
  std::array<std::int64_t, 3> lo{0, 0, 0};
  std::array<std::int64_t, 3> hi{0, 0, 0};
  for (int a = 0; a < n; ++a) {
    lo[a] = static_cast<std::int64_t>(std::ceil((x[a] - r - origin[a]) / h - 1e-12));
    hi[a] = static_cast<std::int64_t>(std::floor((x[a] + r - origin[a]) / h + 1e-12));
  }
  const double r2 = r * r * (1.0 + 1e-12);
  Index3 i{0, 0, 0};
  for (i[0] = lo[0]; i[0] <= hi[0]; ++i[0]) {
    for (i[1] = lo[1]; i[1] <= hi[1]; ++i[1]) {
      for (i[2] = lo[2]; i[2] <= hi[2]; ++i[2]) {
        Point y{};
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
          y[a] = origin[a] + h * static_cast<double>(i[a]);
          const double t = y[a] - x[a];
          s += t * t;
        }
        if (s <= r2) fn(i, y);
      }
    }
  }
}

template <class Average>
RestrictionResult restrict_impl(std::shared_ptr<const DMeasureQuadrature> quad,
                                std::span<const double> radii, const RestrictOptions& options,
                                Average&& average) {
  const std::size_t count = quad->size();
  std::vector<std::vector<double>> averages(count, std::vector<double>(radii.size(), 0.0));
  parallel::for_each_index(
      count,
      [&](std::size_t m) {
        for (std::size_t r = 0; r < radii.size(); ++r) {
          averages[m][r] = average(quad->nodes[m], radii[r]);
        }
      },
      16);
  std::vector<double> values(count);
  std::vector<char> converged(count, 1);
  std::size_t bad = 0;
  for (std::size_t m = 0; m < count; ++m) {
    const auto& a = averages[m];
    values[m] = a.back();
    if (a.size() >= 2 && !(std::abs(a[a.size() - 1] - a[a.size() - 2]) < options.atol)) {
      converged[m] = 0;
      ++bad;
    }
  }
  RestrictionResult out{TraceFunction(std::move(quad), std::move(values)), std::move(averages),
                        std::move(converged), bad};
  return out;
}

}  // namespace

RestrictionResult restrict(const LatticeFunction& u, std::shared_ptr<const DMeasureQuadrature> quad,
                           std::span<const double> radii, const RestrictOptions& options) {
  if (!quad) throw ParameterError("restriction needs a quadrature");
  const LatticeSpec& spec = u.spec();
  if (quad->n != spec.n) throw ParameterError("lattice and quadrature live in different dimensions");
  check_radii(radii, spec.spacing);
  return restrict_impl(std::move(quad), radii, options, [&](const Point& x, double r) {
    double sum = 0.0;
    std::size_t count = 0;
    for_each_grid_point(spec.n, spec.origin, spec.spacing, x, r, [&](const Index3& i, const Point&) {
      sum += u.at(i);
      ++count;
    });
    if (count == 0) throw ResolutionError("ball holds no lattice point");
    return sum / static_cast<double>(count);
  });
}

double lattice_ball_average(const Field& f, int n, double h, const Point& x, double r) {
  double sum = 0.0;
  std::size_t count = 0;
  for_each_grid_point(n, Point{}, h, x, r, [&](const Index3&, const Point& y) {
    sum += f(y);
    ++count;
  });
  if (count == 0) throw ResolutionError("ball holds no lattice point");
  return sum / static_cast<double>(count);
}

RestrictionResult restrict_field(const Field& f, double h,
                                 std::shared_ptr<const DMeasureQuadrature> quad,
                                 std::span<const double> radii, const RestrictOptions& options) {
  if (!quad) throw ParameterError("restriction needs a quadrature");
  if (!(h > 0.0)) throw ParameterError("lattice spacing must be positive");
  check_radii(radii, h);
  const int n = quad->n;
  return restrict_impl(std::move(quad), radii, options, [&](const Point& x, double r) {
    return lattice_ball_average(f, n, h, x, r);
  });
}

// ---------------------------------------------------------------------------

ExtensionOperator::ExtensionOperator(const DSet& D, std::shared_ptr<const DMeasureQuadrature> quad,
                                     std::shared_ptr<const WhitneyDecomposition> W)
    : D_(D), quad_(std::move(quad)), W_(std::move(W)), pou_(*W_), index_(*quad_) {
  const int n = D_.ambient();
  if (quad_->n != n || W_->dimension() != n) {
    throw ParameterError("set, quadrature and decomposition live in different dimensions");
  }
  if (D_.dimension() >= static_cast<double>(n)) {
    throw ParameterError("d = n has no Whitney complement to extend through; use extend_codim");
  }
  const std::size_t cubes = W_->size();
  ball_nodes_.assign(cubes, {});
  omega_.assign(cubes, 0.0);
  std::vector<char> empty(cubes, 0);
  parallel::for_each_index(
      cubes,
      [&](std::size_t i) {
        if (!W_->in_index_set(i)) return;
        const WhitneyCube& q = W_->cube(i);
        double mass = 0.0;
        auto& list = ball_nodes_[i];
        index_.for_each_in_ball(q.center, 6.0 * q.diameter, true, [&](std::size_t m) {
          list.push_back(static_cast<std::uint32_t>(m));
          mass += quad_->weights[m];
        });
        std::sort(list.begin(), list.end());
        if (list.empty() || !(mass > 0.0)) {
          empty[i] = 1;
          return;
        }
        mass = 0.0;
        for (auto m : list) mass += quad_->weights[m];
        omega_[i] = 1.0 / mass;
      },
      64);
  for (std::size_t i = 0; i < cubes; ++i) {
    if (!empty[i]) continue;
    const WhitneyCube& q = W_->cube(i);
    std::ostringstream os;
    os << "no quadrature node within 6 l of cube level " << q.level << " index (" << q.index[0]
       << ", " << q.index[1] << ", " << q.index[2] << "); raise the quadrature depth";
    throw ResolutionError(os.str());
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  floor_radius_ = 4.0 * root_n * W_->s_min();
  fill_radius_ = 6.0 * root_n * W_->s_min();
}

ExtensionOperator::Bound ExtensionOperator::bind(const TraceFunction& tu) const {
  if (tu.size() != quad_->size()) {
    throw ParameterError("trace function does not live on the operator's quadrature");
  }
  Bound b;
  b.op_ = this;
  b.node_values_ = tu.values;
  b.cube_average_.assign(W_->size(), 0.0);
  for (std::size_t i = 0; i < W_->size(); ++i) {
    if (ball_nodes_[i].empty()) continue;
    double s = 0.0;
    for (auto m : ball_nodes_[i]) s += quad_->weights[m] * tu.values[m];
    b.cube_average_[i] = omega_[i] * s;
  }
  return b;
}

double ExtensionOperator::Bound::operator()(const Point& x) const {
  const ExtensionOperator& op = *op_;
  const auto cover = op.W_->covering(x);
  double total = 0.0;
  double acc = 0.0;
  for (std::size_t i : cover) {
    const double z = op.pou_.bump(i, x);
    total += z;
    acc += z * cube_average_[i];
  }
  if (total > 0.0) return acc / total;

  if (!(op.D_.distance_bounds(x).lower < op.floor_radius_)) return 0.0;
  const double snap = 1e-12 * std::max(1.0, std::abs(x[0]) + std::abs(x[1]) + std::abs(x[2]));
  std::size_t hit = op.quad_->size();
  op.index_.for_each_in_ball(x, snap, false, [&](std::size_t m) { hit = std::min(hit, m); });
  if (hit < op.quad_->size()) return node_values_[hit];
  double mass = 0.0;
  double sum = 0.0;
  op.index_.for_each_in_ball(x, op.fill_radius_, false, [&](std::size_t m) {
    mass += op.quad_->weights[m];
    sum += op.quad_->weights[m] * node_values_[m];
  });
  if (!(mass > 0.0)) {
    throw ResolutionError("no quadrature node within the fill radius; raise the quadrature depth");
  }
  return sum / mass;
}

LatticeFunction ExtensionOperator::extend(const TraceFunction& tu, const LatticeSpec& target) const {
  if (target.n != D_.ambient()) throw ParameterError("target lattice has the wrong dimension");
  const Bound b = bind(tu);
  std::vector<double> values(target.size());
  parallel::for_each_index(values.size(), [&](std::size_t i) { values[i] = b(target.point(i)); });
  return {target, std::move(values)};
}

LatticeFunction extend(const TraceFunction& tu, const DSet& D,
                       std::shared_ptr<const WhitneyDecomposition> W, const LatticeSpec& target) {
  ExtensionOperator E(D, tu.quad, std::move(W));
  return E.extend(tu, target);
}

CodimResult extend_codim(const TraceFunction& tu, const DSet& D, const RadialSymbol& psi,
                         double alpha, const LatticeSpec& target, const CodimOptions& options) {
  const int n = D.ambient();
  if (D.dimension() != static_cast<double>(n)) {
    throw ParameterError("extend_codim is for d = n; use ExtensionOperator for d < n");
  }
  if (n + 1 > kMaxDimension) throw UnsupportedError("lifted dimension exceeds 3");
  if (target.n != n) throw ParameterError("target lattice has the wrong dimension");
  if (options.radius < 2.0 * options.lifted_spacing * (1.0 - 1e-12)) {
    throw ResolutionError("ball radius is below twice the lifted lattice spacing");
  }
  LiftedSymbol lifted = lift_symbol(psi, alpha);

  const DSet lifted_set = D.embedded();
  auto lifted_quad = std::make_shared<DMeasureQuadrature>(*tu.quad);
  lifted_quad->n = n + 1;
  WhitneyOptions wopt;
  wopt.s_min = options.s_min;
  auto W = std::make_shared<const WhitneyDecomposition>(
      WhitneyDecomposition::build(lifted_set, options.lifted_bbox, wopt));
  ExtensionOperator E(lifted_set, lifted_quad, W);
  const auto bound = E.bind(TraceFunction(lifted_quad, tu.values));
  const Field field = [&bound](const Point& y) { return bound(y); };

  std::vector<double> values(target.size());
  parallel::for_each_index(
      values.size(),
      [&](std::size_t i) {
        Point x = target.point(i);
        x[n] = 0.0;
        values[i] = lattice_ball_average(field, n + 1, options.lifted_spacing, x, options.radius);
      },
      16);
  return {LatticeFunction(target, std::move(values)), lifted, W->size()};
}

// ---------------------------------------------------------------------------

OperatorSummary measure_operator_norms(std::span<const TestFunction> family,
                                       const PipelineSpec& spec, const DSet& D,
                                       std::shared_ptr<const DMeasureQuadrature> quad,
                                       const ExtensionOperator* E) {
  if (!quad) throw ParameterError("operator norms need a quadrature");
  if (spec.pipeline != Pipeline::restrict && E == nullptr) {
    throw ParameterError("extend and roundtrip need an extension operator");
  }
  const double d = D.dimension();
  OperatorSummary summary;
  summary.max_ratio = 0.0;
  for (const TestFunction& t : family) {
    OperatorReport row;
    row.function = t.id;
    row.depth = quad->depth;
    switch (spec.pipeline) {
      case Pipeline::restrict: {
        const LatticeFunction u = t.profile ? LatticeFunction::sample(spec.lattice, *t.profile)
                                            : LatticeFunction::sample(spec.lattice, t.f);
        row.input_norm = difference_norm_alpha_k(u, spec.psi, spec.alpha, spec.k).total;
        const auto R = restrict(u, quad, spec.radii);
        row.output_norm = trace_norm(R.trace, d, spec.psi, spec.alpha, spec.trace).total;
        break;
      }
      case Pipeline::extend: {
        const TraceFunction tu = TraceFunction::sample(quad, t.f);
        row.input_norm = trace_norm(tu, d, spec.psi, spec.alpha, spec.trace).total;
        const LatticeFunction Eu = E->extend(tu, spec.lattice);
        row.output_norm = difference_norm_alpha_k(Eu, spec.psi, spec.alpha, spec.k).total;
        break;
      }
      case Pipeline::roundtrip: {
        const TraceFunction tu = TraceFunction::sample(quad, t.f);
        row.input_norm = trace_norm(tu, d, spec.psi, spec.alpha, spec.trace).total;
        const auto bound = E->bind(tu);
        const Field field = [&bound](const Point& y) { return bound(y); };
        const auto R = restrict_field(field, spec.roundtrip_spacing, quad, spec.radii);
        row.output_norm = trace_norm(R.trace, d, spec.psi, spec.alpha, spec.trace).total;
        for (std::size_t m = 0; m < tu.size(); ++m) {
          row.roundtrip_sup = std::max(row.roundtrip_sup, std::abs(R.trace.values[m] - tu.values[m]));
        }
        break;
      }
    }
    if (row.input_norm == 0.0) {
      row.degenerate = true;
      row.ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.ratio = row.output_norm / row.input_norm;
      summary.max_ratio = std::max(summary.max_ratio, row.ratio);
    }
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

LemmaReport restriction_lemma_check(const RadialSymbol& psi, double alpha, const DSet& D,
                                    const DMeasureQuadrature& quad, const LatticeFunction& f,
                                    std::span<const double> radii) {
  if (D.ambient() != 1 || quad.n != 1 || f.spec().n != 1) {
    throw UnsupportedError("the restriction estimate is implemented on the line only");
  }
  if (!f.profile()) {
    throw UnsupportedError("the restriction estimate needs f with a Gaussian profile");
  }
  const double d = D.dimension();
  if (!check_trace_exponents(ExponentParams{1, d, alpha}, psi.indices())) {
    throw ParameterError(
        "exponent gate fails: need (n - d)/2 < alpha delta1 <= alpha max(delta2, delta4) < (n - d)/2 + 1");
  }
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("radii must be positive and finite");
  }
  const GaussianProfile& g = *f.profile();
  const std::size_t count = quad.size();

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return quad.nodes[a][0] < quad.nodes[b][0]; });
  std::vector<double> xs(count);
  std::vector<double> ws(count);
  for (std::size_t i = 0; i < count; ++i) {
    xs[i] = quad.nodes[order[i]][0];
    ws[i] = quad.weights[order[i]];
  }
  std::vector<double> kf(count, 0.0);
  parallel::for_each_index(
      count,
      [&](std::size_t i) {
        double s = 0.0;
        for (const auto& t : g.terms) {
          s += t.coef * gaussian_bessel_potential(psi, alpha, t.center[0], t.width, xs[i]);
        }
        kf[i] = s;
      },
      4);

  const double f2 = g.l2_norm() * g.l2_norm();
  LemmaReport rep;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double r : radii) {
    const double lhs = 2.0 * parallel::ordered_block_sum(count, 64, [&](std::size_t b, std::size_t e) {
      double s = 0.0;
      for (std::size_t i = b; i < e; ++i) {
        for (std::size_t j = i + 1; j < count && xs[j] - xs[i] < r; ++j) {
          const double diff = kf[i] - kf[j];
          s += diff * diff * ws[i] * ws[j];
        }
      }
      return s;
    });
    const double rhs = std::pow(r, 2.0 * d - 1.0) / std::pow(psi(1.0 / r), alpha) * f2;
    const double ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::quiet_NaN();
    rep.radii.push_back(r);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.ratios.push_back(ratio);
    if (ratio > 0.0) {
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  rep.spread = hi > 0.0 ? hi / lo : 0.0;
  return rep;
}

}  // namespace tracekit
