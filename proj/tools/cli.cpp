#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "tracekit/levy.hpp"
#include "tracekit/norms.hpp"
#include "tracekit/parallel.hpp"
#include "tracekit/whitney.hpp"

namespace tracekit::cli {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at_index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw UsageError(path + ": " + what);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(join(path, key), "missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  return v.get<double>();
}

long long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) bad(path, "expected an integer");
  return v.get<long long>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

double number_or(const json& j, const std::string& key, const std::string& path, double fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : as_number(*it, join(path, key));
}

long long integer_or(const json& j, const std::string& key, const std::string& path,
                     long long fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : as_integer(*it, join(path, key));
}

double number(const json& j, const std::string& key, const std::string& path) {
  return as_number(require(j, key, path), join(path, key));
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) bad(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], at_index(path, i)));
  return out;
}

Point point_of(const json& v, int n, const std::string& path) {
  const auto xs = numbers(v, path);
  if (static_cast<int>(xs.size()) != n) {
    bad(path, "expected " + std::to_string(n) + " coordinates");
  }
  Point p{};
  for (int a = 0; a < n; ++a) p[a] = xs[a];
  return p;
}

Box box_of(const json& j, int n, const std::string& path) {
  Box b;
  b.n = n;
  b.lo = point_of(require(j, "lo", path), n, join(path, "lo"));
  b.hi = point_of(require(j, "hi", path), n, join(path, "hi"));
  for (int a = 0; a < n; ++a) {
    if (!(b.lo[a] < b.hi[a])) bad(join(path, "hi"), "must exceed lo in every coordinate");
  }
  return b;
}

std::uint64_t seed_of(const Invocation& inv, const json& config) {
  if (inv.seed) return *inv.seed;
  const auto it = config.find("seed");
  if (it == config.end()) bad("seed", "required for sampled quantities (config or --seed)");
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
    bad("seed", "expected a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

std::vector<int> depths_of(const Invocation& inv, const json& config, int fallback) {
  if (inv.depth) return {*inv.depth};
  std::vector<int> out;
  if (const auto it = config.find("depths"); it != config.end()) {
    if (!it->is_array() || it->empty()) bad("depths", "expected a non-empty array of integers");
    for (std::size_t i = 0; i < it->size(); ++i) {
      out.push_back(static_cast<int>(as_integer((*it)[i], at_index("depths", i))));
    }
    return out;
  }
  return {static_cast<int>(integer_or(config, "depth", "", fallback))};
}

// Largest power of two not above the node spacing.
double auto_s_min(const DMeasureQuadrature& q) {
  if (!(q.spacing > 0.0)) return 1.0 / 256.0;
  return std::exp2(std::floor(std::log2(q.spacing) + 1e-12));
}

TraceNormOptions trace_options(const json& config, const Invocation& inv) {
  TraceNormOptions o;
  o.variant = TraceVariant::dyadic;
  const auto it = config.find("trace");
  if (it == config.end()) return o;
  const json& t = *it;
  const std::string path = "trace";
  if (const auto v = t.find("variant"); v != t.end()) {
    const std::string s = as_string(*v, join(path, "variant"));
    if (s == "pair") {
      o.variant = TraceVariant::pair;
    } else if (s == "dyadic") {
      o.variant = TraceVariant::dyadic;
    } else {
      bad(join(path, "variant"), "expected \"pair\" or \"dyadic\"");
    }
  }
  o.c = number_or(t, "c", path, o.c);
  o.N = static_cast<int>(integer_or(t, "N", path, o.N));
  o.pair_cap = static_cast<std::size_t>(
      integer_or(t, "pair_cap", path, static_cast<long long>(o.pair_cap)));
  if (const auto v = t.find("subsample"); v != t.end()) {
    if (!v->is_boolean()) bad(join(path, "subsample"), "expected a boolean");
    o.subsample = v->get<bool>();
  }
  if (o.subsample) o.seed = seed_of(inv, t.contains("seed") ? t : json::object());
  return o;
}

class Csv {
 public:
  Csv(const std::filesystem::path& dir, const std::string& name, std::vector<std::string> header)
      : columns_(header.size()) {
    std::filesystem::create_directories(dir);
    path_ = dir / (name + ".csv");
    file_.open(path_, std::ios::binary | std::ios::trunc);
    if (!file_) throw UsageError("--out: cannot write " + path_.string());
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) file_ << ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") == std::string::npos) {
        file_ << c;
      } else {
        file_ << '"';
        for (char ch : c) file_ << (ch == '"' ? "\"\"" : std::string(1, ch));
        file_ << '"';
      }
    }
    file_ << '\n';
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::size_t columns_;
  std::filesystem::path path_;
  std::ofstream file_;
};

std::string num(double v) { return format_number(v); }
std::string integer(long long v) { return std::to_string(v); }

const json& symbol_node(const json& config) { return require(config, "symbol", ""); }

// ---------------------------------------------------------------------------

void run_symbols_check(const Invocation& inv, const json& config, std::ostream& out) {
  std::vector<std::pair<std::string, BernsteinSymbol>> symbols;
  if (const auto it = config.find("symbols"); it != config.end()) {
    if (!it->is_array() || it->empty()) bad("symbols", "expected a non-empty array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      symbols.emplace_back(at_index("symbols", i), parse_symbol((*it)[i], at_index("symbols", i)));
    }
  } else {
    symbols.emplace_back("symbol", parse_symbol(symbol_node(config), "symbol"));
  }
  std::optional<ExponentParams> gate;
  if (config.contains("alpha") && config.contains("set")) {
    const DSet D = parse_set(config["set"], "set");
    gate = ExponentParams{D.ambient(), D.dimension(), number(config, "alpha", "")};
  }

  const auto lambdas = log_grid(1.0, 1e3, 64);
  const auto rs = log_grid(1e-3, 1e3, 64);
  Csv csv(inv.out, "symbols-check",
          {"symbol", "delta1", "delta2", "delta3", "delta4", "large_lo", "large_hi", "small_lo",
           "small_hi", "bernstein_violation", "gate"});
  for (const auto& [path, phi] : symbols) {
    const RadialSymbol psi(phi);
    const ScalingIndices idx = psi.indices();
    const auto large = estimate_scaling_indices(psi, ScalingRegime::large_argument);
    const auto small = estimate_scaling_indices(psi, ScalingRegime::small_argument);
    const auto bounds = check_bernstein_bounds(phi, lambdas, rs);
    std::string gate_cell = "na";
    if (gate) gate_cell = check_trace_exponents(*gate, idx) ? "1" : "0";
    csv.row({phi.describe(), num(idx.delta1), num(idx.delta2), num(idx.delta3), num(idx.delta4),
             num(large.lo), num(large.hi), num(small.lo), num(small.hi),
             num(bounds.max_violation), gate_cell});
    out << path << ": " << phi.describe() << "  bernstein violation "
        << num(bounds.max_violation) << "\n";
  }
  out << "wrote " << csv.path().string() << "\n";
}

void run_norms(const Invocation& inv, const json& config, std::ostream& out) {
  const BernsteinSymbol phi = parse_symbol(symbol_node(config), "symbol");
  const RadialSymbol psi(phi);
  const double alpha = number(config, "alpha", "");
  const int k = static_cast<int>(integer_or(config, "k", "", 1));
  const LatticeSpec spec = parse_lattice(require(config, "lattice", ""), "lattice");
  const auto family = parse_family(require(config, "family", ""), spec.n, "family");
  const double h0 = number_or(config, "h0", "", 1.0);
  const double c = number_or(config, "c", "", 1.0);
  const int N = static_cast<int>(integer_or(config, "N", "", 0));

  std::vector<std::string> variants{"fourier", "difference_1", "difference_alpha_k", "dyadic",
                                    "moura"};
  if (const auto it = config.find("variants"); it != config.end()) {
    if (!it->is_array() || it->empty()) bad("variants", "expected a non-empty array");
    variants.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string v = as_string((*it)[i], at_index("variants", i));
      if (v != "fourier" && v != "difference_1" && v != "difference_alpha_k" && v != "dyadic" &&
          v != "moura") {
        bad(at_index("variants", i), "unknown variant \"" + v + "\"");
      }
      variants.push_back(v);
    }
  }

  Csv csv(inv.out, "norms",
          {"function", "variant", "alpha", "k", "h0", "c", "N", "l2_part", "seminorm_part", "total",
           "resolution", "truncation"});
  for (const auto& f : family) {
    const LatticeFunction u =
        f.profile ? LatticeFunction::sample(spec, *f.profile) : LatticeFunction::sample(spec, f.f);
    for (const auto& v : variants) {
      NormReport r;
      std::string h0_cell, c_cell, N_cell, k_cell = integer(k);
      if (v == "fourier") {
        r = fourier_norm(u, psi, alpha);
        k_cell.clear();
      } else if (v == "difference_1") {
        r = difference_norm_1(u, phi);
        k_cell = "1";
      } else if (v == "difference_alpha_k") {
        r = difference_norm_alpha_k(u, psi, alpha, k, h0);
        h0_cell = num(h0);
      } else if (v == "dyadic") {
        r = dyadic_norm_2(u, psi, alpha, k, c, N);
        c_cell = num(c);
        N_cell = integer(N);
      } else {
        r = moura_norm(u, psi, alpha, k);
      }
      csv.row({f.id, v, num(alpha), k_cell, h0_cell, c_cell, N_cell, num(r.l2_part),
               num(r.seminorm_part), num(r.total), num(r.resolution), num(r.truncation)});
      out << f.id << " " << v << ": " << num(r.total) << "\n";
    }
  }
  out << "wrote " << csv.path().string() << "\n";
}

WhitneyOptions whitney_options(const json& w, double default_s_min) {
  WhitneyOptions opts;
  opts.s_min = number_or(w, "s_min", "whitney", default_s_min);
  opts.epsilon = number_or(w, "epsilon", "whitney", opts.epsilon);
  const long long cap =
      integer_or(w, "cube_cap", "whitney", static_cast<long long>(opts.cube_cap));
  if (cap <= 0) bad("whitney.cube_cap", "must be positive");
  opts.cube_cap = static_cast<std::size_t>(cap);
  return opts;
}

void run_whitney(const Invocation& inv, const json& config, std::ostream& out) {
  const DSet D = parse_set(require(config, "set", ""), "set");
  const int n = D.ambient();
  const json& w = require(config, "whitney", "");
  const Box bbox = box_of(w, n, "whitney");
  const WhitneyOptions opts = whitney_options(w, WhitneyOptions{}.s_min);
  const long long samples = integer_or(w, "samples", "whitney", 1000);
  if (samples < 0) bad("whitney.samples", "must be non-negative");

  const auto W = WhitneyDecomposition::build(D, bbox, opts);
  std::vector<std::string> header{"M"};
  for (int a = 0; a < n; ++a) header.push_back("center_" + std::to_string(a));
  for (const char* col : {"side", "dist", "dist_upper", "dist_over_l"}) header.emplace_back(col);
  Csv csv(inv.out, "whitney", header);
  for (const auto& q : W.cubes()) {
    std::vector<std::string> row{integer(q.level)};
    for (int a = 0; a < n; ++a) row.push_back(num(q.center[a]));
    row.push_back(num(q.side));
    row.push_back(num(q.dist.lower));
    row.push_back(num(q.dist.upper));
    row.push_back(num(q.dist.lower / q.diameter));
    csv.row(row);
  }
  out << "cubes " << W.size() << ", dropped " << W.dropped_count() << ", uncovered volume "
      << num(W.uncovered_volume()) << ", overlap " << overlap_number(W) << "\n";
  if (samples > 0) {
    const std::uint64_t seed = seed_of(inv, config);
    const PartitionOfUnity pou(W);
    const auto pts = sample_covered_points(W, static_cast<std::size_t>(samples), seed);
    const auto diag = measure_partition(pou, pts);
    out << "partition: max |sum - 1| " << num(diag.max_sum_error) << ", gradient constant "
        << num(diag.gradient_constant) << "\n";
  }
  out << "wrote " << csv.path().string() << "\n";
}

void run_kernel(const Invocation& inv, const json& config, std::ostream& out) {
  const BernsteinSymbol phi = parse_symbol(symbol_node(config), "symbol");
  const RadialSymbol psi(phi);
  const double alpha = number(config, "alpha", "");
  const json empty = json::object();
  const json& kj = config.contains("kernel") ? config["kernel"] : empty;
  const double lo = number_or(kj, "lo", "kernel", 1e-2);
  const double hi = number_or(kj, "hi", "kernel", 1.0);
  const long long count = integer_or(kj, "count", "kernel", 33);
  if (!(lo > 0.0 && lo < hi)) bad("kernel.lo", "need 0 < lo < hi");
  if (count < 2) bad("kernel.count", "need at least 2 points");
  const auto grid = log_grid(lo, hi, static_cast<std::size_t>(count));

  const KernelProfile K(psi, alpha);
  std::vector<double> val(grid.size()), der(grid.size());
  parallel::for_each_index(
      grid.size(),
      [&](std::size_t i) {
        val[i] = K(grid[i]);
        der[i] = K.derivative(grid[i]);
      },
      1);
  Csv csv(inv.out, "kernel", {"x", "kernel", "derivative", "scaled_kernel", "scaled_derivative"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const double w = std::pow(phi(1.0 / (x * x)), 0.5 * alpha);
    csv.row({num(x), num(val[i]), num(der[i]), num(std::abs(val[i]) * x * w),
             num(std::abs(der[i]) * x * x * w)});
  }
  if (alpha * psi.indices().upper() < 1.0) {
    const auto c = check_kernel_decay(psi, alpha, phi, grid);
    out << "decay constants: C0 " << num(c.c0) << ", C1 " << num(c.c1) << "\n";
  } else {
    out << "decay bounds not checked: alpha (delta2 v delta4) >= n\n";
  }
  out << "wrote " << csv.path().string() << "\n";
}

void run_trace_roundtrip(const Invocation& inv, const json& config, std::ostream& out) {
  const DSet D = parse_set(require(config, "set", ""), "set");
  const int n = D.ambient();
  const BernsteinSymbol phi = parse_symbol(symbol_node(config), "symbol");
  const RadialSymbol psi(phi);
  const double alpha = number(config, "alpha", "");
  const int k = static_cast<int>(integer_or(config, "k", "", 1));
  const auto family = parse_family(require(config, "family", ""), n, "family");
  const auto depths = depths_of(inv, config, 8);
  const TraceNormOptions topt = trace_options(config, inv);
  const bool codim = D.dimension() == static_cast<double>(n);

  const json empty = json::object();
  const json& rt = config.contains("roundtrip") ? config["roundtrip"] : empty;
  std::vector<double> steps{8.0, 4.0, 2.0};
  if (const auto it = rt.find("radii_steps"); it != rt.end()) {
    steps = numbers(*it, "roundtrip.radii_steps");
  }
  const double factor = number_or(rt, "spacing_factor", "roundtrip", 0.5);
  if (!(factor > 0.0)) bad("roundtrip.spacing_factor", "must be positive");

  const json& w = require(config, "whitney", "");
  Csv csv(inv.out, "trace-roundtrip",
          {"function", "depth", "input_norm", "output_norm", "ratio", "roundtrip_sup"});
  for (int depth : depths) {
    auto quad = std::make_shared<const DMeasureQuadrature>(measure_quadrature(D, depth));
    const WhitneyOptions wopt = whitney_options(w, auto_s_min(*quad));
    const double s_min = wopt.s_min;
    std::vector<OperatorReport> rows;
    if (!codim) {
      const Box bbox = box_of(w, n, "whitney");
      auto W = std::make_shared<const WhitneyDecomposition>(WhitneyDecomposition::build(D, bbox, wopt));
      const ExtensionOperator E(D, quad, W);
      PipelineSpec ps;
      ps.pipeline = Pipeline::roundtrip;
      ps.psi = psi;
      ps.alpha = alpha;
      ps.k = k;
      ps.roundtrip_spacing = s_min * factor;
      for (double s : steps) ps.radii.push_back(s * ps.roundtrip_spacing);
      ps.trace = topt;
      rows = measure_operator_norms(family, ps, D, quad, &E).rows;
    } else {
      const LatticeSpec target = parse_lattice(require(config, "lattice", ""), "lattice");
      CodimOptions copt;
      copt.s_min = s_min;
      copt.lifted_bbox = box_of(w, n + 1, "whitney");
      copt.lifted_spacing = s_min * factor;
      copt.radius = 2.0 * copt.lifted_spacing;
      std::vector<double> radii;
      for (double s : steps) radii.push_back(s * target.spacing);
      for (const auto& f : family) {
        const TraceFunction tu = TraceFunction::sample(quad, f.f);
        OperatorReport row;
        row.function = f.id;
        row.depth = depth;
        row.input_norm = trace_norm(tu, D.dimension(), psi, alpha, topt).total;
        const auto lifted = extend_codim(tu, D, psi, alpha, target, copt);
        const auto R = restrict(lifted.values, quad, radii);
        row.output_norm = trace_norm(R.trace, D.dimension(), psi, alpha, topt).total;
        for (std::size_t m = 0; m < tu.size(); ++m) {
          row.roundtrip_sup = std::max(row.roundtrip_sup, std::abs(R.trace.values[m] - tu.values[m]));
        }
        row.degenerate = row.input_norm == 0.0;
        row.ratio = row.degenerate ? std::nan("") : row.output_norm / row.input_norm;
        rows.push_back(row);
      }
    }
    for (const auto& r : rows) {
      csv.row({r.function, integer(depth), num(r.input_norm), num(r.output_norm), num(r.ratio),
               num(r.roundtrip_sup)});
      out << "depth " << depth << " " << r.function << ": ratio " << num(r.ratio)
          << ", roundtrip sup " << num(r.roundtrip_sup) << "\n";
    }
  }
  out << "wrote " << csv.path().string() << "\n";
}

void run_lemma31(const Invocation& inv, const json& config, std::ostream& out) {
  const DSet D = parse_set(require(config, "set", ""), "set");
  const BernsteinSymbol phi = parse_symbol(symbol_node(config), "symbol");
  const RadialSymbol psi(phi);
  const double alpha = number(config, "alpha", "");
  const int depth = depths_of(inv, config, 10).front();
  const LatticeSpec spec = parse_lattice(require(config, "lattice", ""), "lattice");
  const auto family = parse_family(require(config, "family", ""), spec.n, "family");
  const TestFunction* g = nullptr;
  for (const auto& f : family) {
    if (f.profile) {
      g = &f;
      break;
    }
  }
  if (g == nullptr) bad("family", "needs a gaussian member");
  std::vector<double> radii;
  if (const auto it = config.find("radii"); it != config.end()) {
    radii = numbers(*it, "radii");
  } else {
    for (double r = 1.0 / 3.0; r >= 1.0 / 48.0 * (1 - 1e-12); r *= 0.5) radii.push_back(r);
  }
  const auto quad = measure_quadrature(D, depth);
  const auto f = LatticeFunction::sample(spec, *g->profile);
  const auto rep = restriction_lemma_check(psi, alpha, D, quad, f, radii);
  Csv csv(inv.out, "lemma31", {"r", "lhs", "rhs", "ratio"});
  for (std::size_t i = 0; i < rep.radii.size(); ++i) {
    csv.row({num(rep.radii[i]), num(rep.lhs[i]), num(rep.rhs[i]), num(rep.ratios[i])});
  }
  out << g->id << ": max/min ratio " << num(rep.spread) << "\n";
  out << "wrote " << csv.path().string() << "\n";
}

}  // namespace

// ---------------------------------------------------------------------------

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parameter:
    case ErrorKind::domain:
    case ErrorKind::resolution:
    case ErrorKind::geometry:
    case ErrorKind::not_strongly_increasing:
      return kGate;
    case ErrorKind::resource:
      return kResource;
    case ErrorKind::range:
    case ErrorKind::numeric:
    case ErrorKind::coverage:
    case ErrorKind::unsupported:
      return kNumeric;
  }
  return kNumeric;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

BernsteinSymbol parse_symbol(const json& j, const std::string& path) {
  const std::string family = as_string(require(j, "family", path), join(path, "family"));
  if (family == "power") return BernsteinSymbol::power(number(j, "s", path));
  if (family == "power_sum") {
    return BernsteinSymbol::power_sum(number(j, "s", path), number(j, "s2", path));
  }
  if (family == "log_perturbed") {
    return BernsteinSymbol::log_perturbed(number(j, "s", path), number(j, "beta", path));
  }
  bad(join(path, "family"), "expected power, power_sum or log_perturbed");
}

DSet parse_set(const json& j, const std::string& path) {
  const std::string kind = as_string(require(j, "kind", path), join(path, "kind"));
  const int n = static_cast<int>(integer_or(j, "ambient", path, 1));
  if (n < 1 || n > kMaxDimension) bad(join(path, "ambient"), "expected 1, 2 or 3");
  const double lo = number_or(j, "lo", path, 0.0);
  const double hi = number_or(j, "hi", path, 1.0);
  if (kind == "point") {
    Point p{};
    if (j.contains("at")) p = point_of(j["at"], n, join(path, "at"));
    return DSet::point(p, n);
  }
  if (kind == "segment") return DSet::segment(n, lo, hi);
  if (kind == "cube") return DSet::cube(n, lo, hi);
  if (kind == "flat") {
    return DSet::flat(n, static_cast<int>(as_integer(require(j, "dimension", path), join(path, "dimension"))),
                      lo, hi);
  }
  if (kind == "cantor") {
    return DSet::cantor(number_or(j, "ratio", path, 1.0 / 3.0),
                        static_cast<int>(integer_or(j, "branches", path, 2)), n, lo, hi);
  }
  bad(join(path, "kind"), "expected point, segment, cube, flat or cantor");
}

LatticeSpec parse_lattice(const json& j, const std::string& path) {
  const auto lo = numbers(require(j, "lo", path), join(path, "lo"));
  const int n = static_cast<int>(lo.size());
  if (n < 1 || n > kMaxDimension) bad(join(path, "lo"), "expected 1 to 3 coordinates");
  const Box b = box_of(j, n, path);
  const double h = number(j, "spacing", path);
  if (!(h > 0.0)) bad(join(path, "spacing"), "must be positive");
  try {
    return LatticeSpec::covering(b, h);
  } catch (const ParameterError& e) {
    bad(join(path, "spacing"), e.what());
  }
}

std::vector<TestFunction> parse_family(const json& j, int n, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a non-empty array");
  std::vector<TestFunction> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& m = j[i];
    const std::string p = at_index(path, i);
    const std::string kind = as_string(require(m, "kind", p), join(p, "kind"));
    TestFunction t;
    t.id = m.contains("id") ? as_string(m["id"], join(p, "id")) : kind + std::to_string(i);
    Point center{};
    if (m.contains("center")) center = point_of(m["center"], n, join(p, "center"));
    if (kind == "gaussian") {
      const double width = number(m, "width", p);
      if (!(width > 0.0)) bad(join(p, "width"), "must be positive");
      const auto g = GaussianProfile::single(n, width, center, number_or(m, "coef", p, 1.0));
      t.profile = g;
      t.f = [g](const Point& x) { return g(x); };
    } else if (kind == "constant") {
      const double v = number_or(m, "value", p, 1.0);
      t.f = [v](const Point&) { return v; };
    } else if (kind == "linear") {
      const Point grad = point_of(require(m, "gradient", p), n, join(p, "gradient"));
      const double offset = number_or(m, "offset", p, 0.0);
      t.f = [grad, offset, n](const Point& x) {
        double s = offset;
        for (int a = 0; a < n; ++a) s += grad[a] * x[a];
        return s;
      };
    } else if (kind == "bump") {
      const double width = number(m, "width", p);
      if (!(width > 0.0)) bad(join(p, "width"), "must be positive");
      t.f = [center, width, n](const Point& x) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) s += (x[a] - center[a]) * (x[a] - center[a]);
        const double t2 = s / (width * width);
        return t2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t2)) : 0.0;
      };
    } else if (kind == "cosine") {
      const double freq = number_or(m, "frequency", p, 1.0);
      const long long axis = integer_or(m, "axis", p, 0);
      if (axis < 0 || axis >= n) bad(join(p, "axis"), "out of range");
      t.f = [freq, axis](const Point& x) { return std::cos(2.0 * M_PI * freq * x[axis]); };
    } else {
      bad(join(p, "kind"), "expected gaussian, constant, linear, bump or cosine");
    }
    out.push_back(std::move(t));
  }
  return out;
}

void run(const Invocation& inv, const json& config, std::ostream& out) {
  if (!config.is_object()) throw UsageError("config: expected a JSON object");
  if (const auto it = config.find("experiment"); it != config.end()) {
    if (as_string(*it, "experiment") != inv.command) {
      bad("experiment", "names \"" + it->get<std::string>() + "\" but the command is " + inv.command);
    }
  }
  if (inv.command == "symbols-check") return run_symbols_check(inv, config, out);
  if (inv.command == "norms") return run_norms(inv, config, out);
  if (inv.command == "whitney") return run_whitney(inv, config, out);
  if (inv.command == "kernel") return run_kernel(inv, config, out);
  if (inv.command == "trace-roundtrip") return run_trace_roundtrip(inv, config, out);
  if (inv.command == "lemma31") return run_lemma31(inv, config, out);
  throw UsageError("command: unknown \"" + inv.command + "\"");
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  if (!args.empty() && args.front() == "run") args.erase(args.begin());

  CLI::App app{"tracekit: trace theorem experiments on d-sets"};
  Invocation inv;
  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  int depth = 0;
  app.add_option("command", inv.command, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "Output directory for the CSV");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for sampled quantities");
  auto* depth_opt = app.add_option("--depth", depth, "Quadrature depth, overriding the config")
                        ->check(CLI::Range(0, 40));
  app.add_option("--threads", inv.threads, "Worker threads; results do not depend on it");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << "\n" << app.help();
    return kUsage;
  }
  inv.config = config_path;
  inv.out = out_dir;
  if (seed_opt->count()) inv.seed = seed;
  if (depth_opt->count()) inv.depth = depth;
  if (inv.threads > 0) parallel::set_threads(inv.threads);

  try {
    std::ifstream in(inv.config);
    if (!in) throw UsageError("--config: cannot read " + inv.config.string());
    json config;
    try {
      config = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError("config: " + std::string(e.what()));
    }
    run(inv, config, out);
    return kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumeric;
  }
}

}  // namespace tracekit::cli
