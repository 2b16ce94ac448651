#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "tracekit/geometry.hpp"

namespace tracekit {

struct WhitneyCube {
  int level = 0;  // side = 2^-level
  std::array<std::int64_t, 3> index{};
  Point center{};
  double side = 0.0;
  double diameter = 0.0;  // sqrt(n) * side
  DistanceBounds dist;    // certified bounds on dist(Q, D)

  Box box(int n) const;
};

struct WhitneyOptions {
  double s_min = 1.0 / 256.0;
  double epsilon = 0.125;
  std::size_t cube_cap = 2000000;
};

/// Dyadic Whitney cubes of bbox minus D: every accepted cube satisfies
/// l <= dist(Q, D) <= 4 l with l its diameter. Cubes that would have to be
/// split below s_min are dropped and their volume is reported.
class WhitneyDecomposition {
 public:
  /// bbox corners must be multiples of a common power of two and D must lie in
  /// the interior of bbox.
  static WhitneyDecomposition build(const DSet& D, const Box& bbox, const WhitneyOptions& options);

  int dimension() const noexcept { return n_; }
  double epsilon() const noexcept { return epsilon_; }
  double s_min() const noexcept { return s_min_; }
  const Box& bbox() const noexcept { return bbox_; }
  const std::vector<WhitneyCube>& cubes() const noexcept { return cubes_; }
  const WhitneyCube& cube(std::size_t i) const { return cubes_[i]; }
  std::size_t size() const noexcept { return cubes_.size(); }

  /// Top-level tiles farther than 4 l from D; not part of the decomposition.
  const std::vector<WhitneyCube>& exterior() const noexcept { return exterior_; }
  /// Volume of the dropped cubes next to D.
  double uncovered_volume() const noexcept { return uncovered_volume_; }
  std::size_t dropped_count() const noexcept { return dropped_count_; }

  /// Cubes with side <= 1.
  bool in_index_set(std::size_t i) const { return cubes_[i].side <= 1.0; }
  std::vector<std::size_t> index_set() const;

  /// Half-width of the expanded cube Q* = (1 + epsilon) Q.
  double expanded_half(std::size_t i) const { return 0.5 * (1.0 + epsilon_) * cubes_[i].side; }

  /// Indices (ascending) of cubes whose open expanded cube contains x.
  std::vector<std::size_t> covering(const Point& x) const;
  /// Index of the cube whose closed cube contains x, or size() if none.
  std::size_t containing(const Point& x) const;

 private:
  struct Key {
    int level;
    std::array<std::int64_t, 3> index;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  int n_ = 1;
  double epsilon_ = 0.125;
  double s_min_ = 0.0;
  Box bbox_;
  std::vector<WhitneyCube> cubes_;
  std::vector<WhitneyCube> exterior_;
  std::vector<int> levels_;
  std::unordered_map<Key, std::size_t, KeyHash> lookup_;
  double uncovered_volume_ = 0.0;
  std::size_t dropped_count_ = 0;
};

/// phi_i = zeta_i / sum_k zeta_k with zeta_i the tensor product of
/// exp(-1 / (1 - t^2)) rescaled to the expanded cube Q_i*.
class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(const WhitneyDecomposition& W);

  struct Term {
    std::size_t cube;
    double value;
  };

  /// Nonzero terms at x. Throws CoverageError when no expanded cube contains x.
  std::vector<Term> evaluate(const Point& x) const;
  double value(std::size_t i, const Point& x) const;
  /// Gradient of phi_i at x.
  Point gradient(std::size_t i, const Point& x) const;
  /// Largest second partial derivative of phi_i at x (central differences of the gradient).
  double max_second_derivative(std::size_t i, const Point& x) const;

  /// Raw bump zeta_i.
  double bump(std::size_t i, const Point& x) const;

  const WhitneyDecomposition& decomposition() const noexcept { return *W_; }

 private:
  const WhitneyDecomposition* W_;
};

struct PartitionDiagnostics {
  std::size_t samples = 0;
  double max_sum_error = 0.0;         // max |sum phi_i - 1|
  double min_value = 0.0;             // min phi_i over evaluated terms
  double gradient_constant = 0.0;     // max |grad phi_i| l_i
  double hessian_constant = 0.0;      // max |D^2 phi_i| l_i^2
  std::size_t overlap = 0;            // max number of expanded cubes at a point
};

/// Scans the given points, each of which must be covered.
PartitionDiagnostics measure_partition(const PartitionOfUnity& pou, std::span<const Point> points,
                                       bool second_derivatives = false);

/// Largest number of open expanded cubes containing a vertex of some cube;
/// vertices are where the overlap peaks.
std::size_t overlap_number(const WhitneyDecomposition& W);

/// Seeded points of bbox that lie in a cube of the decomposition.
std::vector<Point> sample_covered_points(const WhitneyDecomposition& W, std::size_t count,
                                         std::uint64_t seed, double min_distance = 0.0,
                                         const DSet* D = nullptr);

}  // namespace tracekit
