#pragma once

#include <span>
#include <vector>

#include "tracekit/symbols.hpp"

namespace tracekit {

/// Tightest growth constants d0 = min gamma_{j+1}/gamma_j and
/// d1 = max gamma_{j+1}/gamma_j of a finite positive sequence.
struct GrowthBounds {
  double d0 = 0.0;
  double d1 = 0.0;
};

GrowthBounds check_admissible(std::span<const double> gamma);

/// Smallest kappa0 with 2 N_j <= N_k whenever j <= k - kappa0, on the given
/// window. The answer must already be reached on the leading half of the
/// window; a kappa0 that keeps growing with the window means no uniform gap
/// exists and NotStronglyIncreasingError is thrown.
int check_strongly_increasing(std::span<const double> N);

/// N_j = sup{r : a(r) <= 2^{j r_exp}} for j = 0..count-1, by inversion of the
/// radial symbol. The result is verified to be strongly increasing.
std::vector<double> make_N_sequence(const RadialSymbol& a, double r_exp, int count);

/// sigma^alpha_j = 2^{alpha j}, j = 0..count-1.
std::vector<double> smoothness_sequence(double alpha, int count);

/// Finite-window Boyd indices (natural logarithm). With
///   upper_j = max_{k<=J} gamma_{j+k}/gamma_k,  lower_j = min_{k<=J} gamma_{j+k}/gamma_k,
/// upper = min_{J/2<=j<=J} log(upper_j)/j and lower = max_{J/2<=j<=J} log(lower_j)/j.
/// gamma must hold at least 2J + 1 entries and J >= 8.
struct BoydIndices {
  double lower = 0.0;
  double upper = 0.0;
  int window = 0;
};

inline constexpr int kDefaultBoydWindow = 48;

BoydIndices boyd_indices(std::span<const double> gamma, int J = kDefaultBoydWindow);

/// Smallest integer k > upper(sigma) / lower(N).
int min_difference_order(const BoydIndices& sigma, const BoydIndices& N);

/// Same for sigma = sigma^alpha and N = N^{psi,2} on the default window.
int min_difference_order(double alpha, const RadialSymbol& psi, int J = kDefaultBoydWindow);

}  // namespace tracekit
