#pragma once

#include <array>
#include <limits>
#include <vector>

#include "aeset/core.hpp"

namespace aeset {

// Diagonal coefficients below this count as zero in the two-qubit criterion.
inline constexpr double kCriterionZero = 1e-12;

/// Outcome of the sufficient two-qubit AES test for one ordering of 4 states.
///
/// With c = min_{i=2,3,4} |c_i1| and L built from r_ij = |c_ij| / |c_ii|,
/// the set is certified absolutely entangled when c > 1 - 2 / (L + 1)
/// and c_22 != 0. "Not detected" says nothing either way.
struct CriterionVerdict {
  bool detected = false;
  /// permutation[i] is the input index placed at position i.
  std::array<int, 4> permutation{0, 1, 2, 3};
  double c = 0.0;
  double L = std::numeric_limits<double>::infinity();
  double threshold = 1.0;
  double c22 = 0.0;

  double margin() const { return c - threshold; }
};

struct SubsetReport {
  std::array<int, 4> subset_indices{};  // strictly increasing, 0-based
  CriterionVerdict verdict;
};

struct MaximalScanReport {
  std::vector<SubsetReport> subsets;
  int certified_count = 0;
  /// True when every 4-subset is certified; then at least N - 3 states stay
  /// entangled under any global unitary.
  bool all_subsets_certified = false;
};

/// 1 - 2 / (L + 1); 1 when L is infinite.
double criterion_threshold(double L);

/// L = 1 + (r32 + sqrt(r32^2 + 1))^2
///       + (r42 + r43 (r32 + sqrt(r32^2 + 1)) + sqrt(1 + r42^2 + r43^2))^2,
/// infinite when |c33| or |c44| vanishes.
double compute_L(const TriangularForm& tf);

/// Triangularizes the 4 states of C^4 = C^2 (x) C^2 in the given order.
CriterionVerdict theorem1_check_ordering(const StateSet& states);

/// Tries all 24 orderings lexicographically; returns the first detecting one,
/// otherwise the ordering with the largest c - threshold.
CriterionVerdict theorem1_scan(const StateSet& states);

/// theorem1_scan on every 4-subset (lexicographic order) of N >= 4 states.
MaximalScanReport maximal_entangled_scan(const StateSet& states);

}  // namespace aeset
