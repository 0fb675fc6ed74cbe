#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "aeset/core.hpp"
#include "aeset/criterion.hpp"

namespace aeset {

inline constexpr double kDefaultCoplanarityTolerance = 1e-3;
inline constexpr double kDefaultBisectionResolution = 1e-3;

/// Threshold data of the phi_1 = xi_1, phi_i = a xi_1 + sqrt(1 - a^2) xi_i
/// family for one partition.
struct AminReport {
  Partition partition;
  int N = 0;                   // sum d_i - k + 2
  std::vector<double> D;       // D_1 .. D_{k-1}
  std::vector<double> terms;   // one candidate a_min per index i
  double amin_max = 0.0;       // max of terms: the proven sufficient bound
  double amin_min = 0.0;       // min of terms
};

struct AminTable {
  std::vector<AminReport> rows;
  int all_N = 0;           // max_p N_p
  double all_amin_max = 0;  // max_p amin_max
  double all_amin_min = 0;  // max_p amin_min
};

/// N unit vectors in R^3 such that every 4 of them span a tetrahedron.
struct SpherePoints {
  std::vector<Eigen::Vector3d> points;
  double min_tetra_det = 0.0;
};

/// phi_1 = e_0, phi_i = a e_0 + sqrt(1 - a^2) e_{i-1}, i = 2..N with
/// N = sum d_i - k + 2. For a bipartition this is the d_1 + d_2 state family.
StateSet theorem4_states(const Partition& p, double a);

/// The d_1 + d_2 state family for a bipartition, with overlap c.
StateSet special_set(int d1, int d2, double c);

/// D_i = sum_{j > i} (d_j - 1) + (k - 1 - i) / (k - 1) and
/// term_i = sqrt((d_i - 1) D_i / ((d_i - 1 + 1/(k-1)) (D_i + 1/(k-1)))).
/// Factors are used in the order given.
AminReport theorem4_amin(const Partition& p);

/// sqrt((d1-1)(d2-1) / ((N - d1)(N - d2))): the overlap above which the
/// first N states of the bipartite family can no longer all be made product.
/// Equals the two-factor a_min at N = d1 + d2 and 1/sqrt(d) at N = d.
double bipartite_amin_for_count(int d1, int d2, int n);

/// Every factorization of d into >= 2 factors >= 2, each tuple nondecreasing,
/// ordered by length then lexicographically.
std::vector<std::vector<int>> multiplicative_partitions(int d);

/// One report per multiplicative partition plus the all-partitions summary.
AminTable amin_table(int d);

/// |det| of the 4x4 matrix with rows (x, y, z, 1).
double tetrahedron_determinant(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                               const Eigen::Vector3d& c, const Eigen::Vector3d& d);

/// Checks hand-supplied points; throws InvalidInput when a point is not a unit
/// vector or some 4-subset has |det| < tol.
SpherePoints validate_general_position(std::vector<Eigen::Vector3d> points,
                                       double tol = kDefaultCoplanarityTolerance);

/// Draws normalized 3D Gaussians, resampling any point that would create a
/// 4-subset with |det| < tol.
SpherePoints sphere_points_general_position(
    int n, RunSeed seed, double tol = kDefaultCoplanarityTolerance);

/// phi_i = a e_0 + sqrt(1 - a^2) (v_i1 e_1 + v_i2 e_2 + v_i3 e_3) in C^4.
StateSet theorem2_states(const SpherePoints& pts, double a);

/// The symmetric 5-state set in C^4: e_0, b e_0 + sqrt(1-b^2) e_j (j=1,2,3)
/// and b e_0 + sqrt((1-b^2)/3) (e_1 + e_2 + e_3).
StateSet n5_symmetric_set(double b);

using FamilyGenerator = std::function<StateSet(double)>;

struct CriticalSearchResult {
  /// Per requested subset: smallest detecting parameter, or nullopt when even
  /// 1 - resolution is not detected.
  std::vector<std::optional<double>> per_subset;
  /// Max over subsets; nullopt if any subset was not found.
  std::optional<double> critical;
};

/// Bisection on a in (0, 1) for the smallest a at which theorem1_scan detects
/// each listed 4-subset (0-based indices). Assumes detection is monotone in a.
CriticalSearchResult critical_a_search(
    const FamilyGenerator& family,
    const std::vector<std::array<int, 4>>& subsets,
    double resolution = kDefaultBisectionResolution);

struct AsymptoticThreshold {
  Eigen::Matrix3d U;  // lower-triangular Gram-Schmidt coefficients of the u_i
  double L_prime = 0.0;
  double o = 0.0;     // 1 - 2 / (L' + 1)
};

/// Limit a -> 1 of the criterion threshold for one ordered 4-subset of
/// theorem2_states: u_i = v_i - v_0 (normalized), U_ij = <u'_j|u_i>, and
/// L' = 1 + ((|U21| + 1)/|U22|)^2
///        + (|U31|/|U33| + |U32|/|U33| (|U21| + 1)/|U22| + 1/|U33|)^2.
AsymptoticThreshold theorem2_asymptotic_threshold(
    const SpherePoints& pts, const std::array<int, 4>& subset);

}  // namespace aeset
