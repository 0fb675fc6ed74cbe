#include "aeset/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aeset {
namespace {

template <class CoeffMat>
double l_from_coeffs(const CoeffMat& c) {
  const double c33 = std::abs(c(2, 2));
  const double c44 = std::abs(c(3, 3));
  if (c33 < kCriterionZero || c44 < kCriterionZero) {
    return std::numeric_limits<double>::infinity();
  }
  const double r32 = std::abs(c(2, 1)) / c33;
  const double r42 = std::abs(c(3, 1)) / c44;
  const double r43 = std::abs(c(3, 2)) / c44;
  const double first = r32 + std::sqrt(r32 * r32 + 1.0);
  const double second =
      r42 + r43 * first + std::sqrt(1.0 + r42 * r42 + r43 * r43);
  return 1.0 + first * first + second * second;
}

void require_two_qubit(const StateSet& states, int count) {
  if (states.dim() != 4) {
    throw Error(ErrorKind::InvalidDimension,
                "the two-qubit criterion needs states in C^4");
  }
  if (count >= 0 && states.size() != count) {
    throw Error(ErrorKind::InvalidCount,
                "expected exactly " + std::to_string(count) + " states");
  }
}

Eigen::Matrix4cd columns_of(const StateSet& states) {
  Eigen::Matrix4cd m;
  for (int i = 0; i < 4; ++i) m.col(i) = states[i].amplitudes();
  return m;
}

CriterionVerdict verdict_for(const Eigen::Matrix4cd& columns,
                             const std::array<int, 4>& perm) {
  Eigen::Matrix4cd ordered;
  for (int i = 0; i < 4; ++i) ordered.col(i) = columns.col(perm[static_cast<std::size_t>(i)]);
  Eigen::Matrix4cd coeffs;
  Eigen::Matrix4cd basis;
  std::array<bool, 4> dependent{};
  detail::gram_schmidt(ordered, coeffs, basis, dependent);

  CriterionVerdict v;
  v.permutation = perm;
  v.c = std::min({std::abs(coeffs(1, 0)), std::abs(coeffs(2, 0)),
                  std::abs(coeffs(3, 0))});
  v.L = l_from_coeffs(coeffs);
  v.threshold = criterion_threshold(v.L);
  v.c22 = std::abs(coeffs(1, 1));
  v.detected = v.c > v.threshold && v.c22 > kCriterionZero;
  return v;
}

CriterionVerdict scan_columns(const Eigen::Matrix4cd& columns) {
  std::array<int, 4> perm{0, 1, 2, 3};
  CriterionVerdict best;
  bool have_best = false;
  do {
    CriterionVerdict v = verdict_for(columns, perm);
    if (v.detected) return v;
    if (!have_best || v.margin() > best.margin()) {
      best = v;
      have_best = true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

double criterion_threshold(double L) {
  if (std::isinf(L)) return 1.0;
  return 1.0 - 2.0 / (L + 1.0);
}

double compute_L(const TriangularForm& tf) {
  if (tf.coeffs.rows() != 4 || tf.coeffs.cols() != 4) {
    throw Error(ErrorKind::InvalidCount,
                "L is defined for triangular forms of exactly 4 states");
  }
  return l_from_coeffs(tf.coeffs);
}

CriterionVerdict theorem1_check_ordering(const StateSet& states) {
  require_two_qubit(states, 4);
  return verdict_for(columns_of(states), {0, 1, 2, 3});
}

CriterionVerdict theorem1_scan(const StateSet& states) {
  require_two_qubit(states, 4);
  return scan_columns(columns_of(states));
}

MaximalScanReport maximal_entangled_scan(const StateSet& states) {
  require_two_qubit(states, -1);
  const int n = states.size();
  if (n < 4) {
    throw Error(ErrorKind::InvalidCount, "need at least 4 states");
  }
  MaximalScanReport report;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        for (int d = c + 1; d < n; ++d) {
          Eigen::Matrix4cd cols;
          cols.col(0) = states[a].amplitudes();
          cols.col(1) = states[b].amplitudes();
          cols.col(2) = states[c].amplitudes();
          cols.col(3) = states[d].amplitudes();
          SubsetReport sub{{a, b, c, d}, scan_columns(cols)};
          if (sub.verdict.detected) ++report.certified_count;
          report.subsets.push_back(sub);
        }
      }
    }
  }
  report.all_subsets_certified =
      report.certified_count == static_cast<int>(report.subsets.size());
  return report;
}

}  // namespace aeset
