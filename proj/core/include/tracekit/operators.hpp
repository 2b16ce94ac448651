#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tracekit/geometry.hpp"
#include "tracekit/lattice.hpp"
#include "tracekit/norms.hpp"
#include "tracekit/symbols.hpp"
#include "tracekit/whitney.hpp"

namespace tracekit {

using Field = std::function<double(const Point&)>;

struct RestrictOptions {
  /// A node counts as converged when the last two ball averages differ by less than atol.
  double atol = 1e-2;
};

struct RestrictionResult {
  TraceFunction trace;
  /// averages[m][r]: ball average at node m for the r-th radius.
  std::vector<std::vector<double>> averages;
  std::vector<char> converged;
  std::size_t nonconverged = 0;
};

/// Ball averages of u at every node for a decreasing radius schedule; the
/// trace value is the average at the last radius. Lattice points outside the
/// lattice count with value 0. The smallest radius must be at least 2h.
RestrictionResult restrict(const LatticeFunction& u, std::shared_ptr<const DMeasureQuadrature> quad,
                           std::span<const double> radii, const RestrictOptions& options = {});

/// Same for a field sampled on the infinite lattice h Z^n.
RestrictionResult restrict_field(const Field& f, double h,
                                 std::shared_ptr<const DMeasureQuadrature> quad,
                                 std::span<const double> radii,
                                 const RestrictOptions& options = {});

/// Mean of f over the points of h Z^n in the closed ball B(x, r).
double lattice_ball_average(const Field& f, int n, double h, const Point& x, double r);

/// Whitney extension for d < n:
///   Eu(x) = sum_{i in I} phi_i(x) omega_i sum_{|x_m - x_i| < 6 l_i} w_m u(x_m),
///   omega_i = (sum_{|x_m - x_i| < 6 l_i} w_m)^{-1}.
/// Points within 4 sqrt(n) s_min of D, which the truncated decomposition leaves
/// uncovered, take the mu-average over B(x, 6 sqrt(n) s_min); a point that
/// coincides with a node keeps its trace value. Points outside every expanded
/// cube and away from D get 0.
class ExtensionOperator {
 public:
  ExtensionOperator(const DSet& D, std::shared_ptr<const DMeasureQuadrature> quad,
                    std::shared_ptr<const WhitneyDecomposition> W);

  class Bound {
   public:
    double operator()(const Point& x) const;

   private:
    friend class ExtensionOperator;
    const ExtensionOperator* op_ = nullptr;
    std::vector<double> cube_average_;  // indexed by cube, 0 outside I
    std::vector<double> node_values_;
  };

  /// Precomputes the per-cube averages of tu.
  Bound bind(const TraceFunction& tu) const;

  LatticeFunction extend(const TraceFunction& tu, const LatticeSpec& target) const;

  const WhitneyDecomposition& decomposition() const noexcept { return *W_; }
  const DMeasureQuadrature& quadrature() const noexcept { return *quad_; }
  double floor_radius() const noexcept { return floor_radius_; }
  double fill_radius() const noexcept { return fill_radius_; }

 private:
  DSet D_;
  std::shared_ptr<const DMeasureQuadrature> quad_;
  std::shared_ptr<const WhitneyDecomposition> W_;
  PartitionOfUnity pou_;
  NodeIndex index_;
  std::vector<std::vector<std::uint32_t>> ball_nodes_;  // per cube, empty outside I
  std::vector<double> omega_;
  double floor_radius_ = 0.0;
  double fill_radius_ = 0.0;
};

/// One-shot Eu on a target lattice.
LatticeFunction extend(const TraceFunction& tu, const DSet& D,
                       std::shared_ptr<const WhitneyDecomposition> W, const LatticeSpec& target);

struct CodimOptions {
  double s_min = 1.0 / 256.0;
  /// Whitney box in R^{n+1}; its first n axes must contain the target lattice.
  Box lifted_bbox;
  /// Spacing of the (n+1)-lattice used for the ball averages back onto R^n x {0}.
  double lifted_spacing = 1.0 / 512.0;
  /// Ball radius of those averages; at least 2 lifted_spacing.
  double radius = 1.0 / 256.0;
};

struct CodimResult {
  LatticeFunction values;
  LiftedSymbol lifted;
  std::size_t cubes = 0;
};

/// d = n: extend D x {0} in R^{n+1} with the lifted symbol and restrict to
/// R^n x {0} by ball averages.
CodimResult extend_codim(const TraceFunction& tu, const DSet& D, const RadialSymbol& psi,
                         double alpha, const LatticeSpec& target, const CodimOptions& options);

enum class Pipeline { restrict, extend, roundtrip };

struct TestFunction {
  std::string id;
  Field f;
  std::optional<GaussianProfile> profile;
};

struct PipelineSpec {
  Pipeline pipeline = Pipeline::roundtrip;
  RadialSymbol psi = RadialSymbol(BernsteinSymbol::power(0.5));
  double alpha = 1.0;
  int k = 1;
  /// Whole-space lattice for ||u|| (restrict) or ||Eu|| (extend).
  LatticeSpec lattice;
  /// Decreasing ball radii for the restriction.
  std::vector<double> radii;
  /// Lattice spacing of the pointwise restriction in the roundtrip.
  double roundtrip_spacing = 0.0;
  TraceNormOptions trace{TraceVariant::dyadic};
};

struct OperatorReport {
  std::string function;
  int depth = 0;
  double input_norm = 0.0;
  double output_norm = 0.0;
  double ratio = 0.0;
  double roundtrip_sup = 0.0;
  /// Zero input: the ratio is 0/0 and excluded from the maximum.
  bool degenerate = false;
};

struct OperatorSummary {
  std::vector<OperatorReport> rows;
  double max_ratio = 0.0;
};

/// restrict:  ||Ru||_{(2),D,mu} / ||u||_{(1),alpha,k}
/// extend:    ||Eu||_{(1),alpha,k} / ||u||_{(2),D,mu}
/// roundtrip: ||REu||_{(2),D,mu} / ||u||_{(2),D,mu} and sup_m |REu - u|(x_m)
/// For restrict the family is sampled on spec.lattice; the other pipelines
/// sample it on the quadrature nodes. E is needed for extend and roundtrip.
OperatorSummary measure_operator_norms(std::span<const TestFunction> family,
                                       const PipelineSpec& spec, const DSet& D,
                                       std::shared_ptr<const DMeasureQuadrature> quad,
                                       const ExtensionOperator* E = nullptr);

struct LemmaReport {
  std::vector<double> radii;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> ratios;
  /// max ratio / min ratio over radii with a positive ratio.
  double spread = 0.0;
};

/// LHS(r) = sum_{0 < |x-y| < r} (K*f(x) - K*f(y))^2 w_x w_y over ordered node
/// pairs, RHS(r) = r^{2d-n} / psi^alpha(1/r) ||f||^2, ratio = LHS / RHS. n = 1
/// and f with a Gaussian profile only.
LemmaReport restriction_lemma_check(const RadialSymbol& psi, double alpha, const DSet& D,
                                    const DMeasureQuadrature& quad, const LatticeFunction& f,
                                    std::span<const double> radii);

}  // namespace tracekit
