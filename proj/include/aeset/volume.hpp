#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aeset/core.hpp"
#include "aeset/optimizer.hpp"
#include "aeset/separability.hpp"

namespace aeset {

enum class VolumeMethod { CriterionOnly, CriterionThenOptimizer };
const char* to_string(VolumeMethod m);

/// Monte-Carlo count of absolutely entangled sets among `samples` Haar sets.
///
/// Sample i is drawn from RunSeed{seed, i}; the optimizer for that sample
/// uses RunSeed{seed, i}.child(1). Counts therefore do not depend on how the
/// samples are split across workers.
struct VolumeEstimate {
  Partition partition;
  int N = 0;
  std::int64_t samples = 0;
  std::int64_t detected = 0;
  /// Sets certified by the two-qubit criterion alone (a subset of `detected`).
  std::int64_t criterion_detected = 0;
  double fraction = 0.0;
  double stddev_counts = 0.0;  // sqrt(samples f (1 - f))
  VolumeMethod method = VolumeMethod::CriterionOnly;
  std::uint64_t seed = 0;
};

struct Theorem3Counts {
  int threshold = 0;              // floor((d1 + 1)(d2 + 1) / 2)
  int quotient_parameters = 0;    // (d1^2 - 1)(d2^2 - 1)
  std::optional<long long> constraints;  // 2 N (d1 - 1)(d2 - 1) when N given
};

/// Smallest set size from which Haar sets of C^d1 (x) C^d2 are absolutely
/// entangled almost surely: floor((d1 + 1)(d2 + 1) / 2).
int theorem3_threshold(int d1, int d2);
Theorem3Counts theorem3_counts(int d1, int d2, std::optional<int> n = {});

/// Fraction of Haar 4-sets of C^2 (x) C^2 certified by theorem1_scan.
/// Other partitions or set sizes raise Unsupported.
VolumeEstimate estimate_volume_lower(const Partition& p, int n,
                                     std::int64_t samples, std::uint64_t seed,
                                     int workers = 1);

/// Same count over caller-supplied sets.
VolumeEstimate estimate_volume_lower(std::span<const StateSet> sets);

/// Criterion first when it applies (every 4-subset at 2x2), otherwise or on
/// failure minimize_total_entropy with cfg (its seed is replaced per sample).
VolumeEstimate estimate_volume(const Partition& p, int n, std::int64_t samples,
                               std::uint64_t seed,
                               const OptimizerConfig& cfg = {}, int workers = 1);

/// Classification of one set by the same pipeline.
bool classify_aes(const StateSet& set, const Partition& p,
                  const OptimizerConfig& cfg, bool* by_criterion = nullptr);

struct BlockSums {
  std::vector<double> S;  // S^(1) .. S^(k-1)
  std::vector<double> B;
  std::vector<double> T;
  double I = 0.0;         // S^(0) = N - 1 for unitary rows
};

/// (d-1) x (d-1) matrix of coefficients b_ij = <j|U|xi_i> for i, j >= 1,
/// where xi_i is the i-th computational basis vector. Requires U e_0 to be
/// e_0 up to a phase.
Eigen::MatrixXcd reduced_block(const Unitary& u);

/// Over the first N - 1 rows of `us` (the images of xi_2 .. xi_N), with flat
/// column index f = column + 1 and tail product t_i = prod_{j > i} d_j:
/// S^(i) sums f in [1, t_i), B^(i) sums f = n t_i and T^(i) sums
/// f = n t_i + j (1 <= n < d_i, 1 <= j < t_i).
BlockSums block_sums(const Eigen::MatrixXcd& us, const Partition& p, int n);

struct ChainLink {
  double S = 0.0;
  double D = 0.0;
  bool holds = false;  // S > D
};

struct ChainReport {
  double a = 0.0;
  double amin_max = 0.0;
  /// a <= amin_max: the chain may be satisfiable and proves nothing.
  bool inconclusive = false;
  std::vector<ChainLink> links;
  std::optional<int> first_violation;  // 1-based index i
  BlockSums sums;
};

/// Evaluates S^(i) > D_i for i = 1 .. k-1 on a theorem4_states set. The
/// overlap a is read off the set; U must satisfy the reduced_block
/// precondition.
ChainReport necessary_condition_chain(const StateSet& set, const Unitary& u,
                                      const Partition& p);

}  // namespace aeset
