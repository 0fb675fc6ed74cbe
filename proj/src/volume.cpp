#include "aeset/volume.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include "aeset/constructions.hpp"
#include "aeset/criterion.hpp"

namespace aeset {
namespace {

constexpr double kSetMatchTolerance = 1e-12;
// A link S > D only holds when it clears rounding; S = D exactly is common
// (e.g. N - 1 = d - 1 makes S a full column norm).
constexpr double kChainSlack = 1e-12;

bool is_two_qubit(const Partition& p) {
  return p.size() == 2 && p.factor(0) == 2 && p.factor(1) == 2;
}

struct Counts {
  std::int64_t detected = 0;
  std::int64_t criterion = 0;
};

// Runs `body(i)` for i in [0, samples) on `workers` threads, thread w taking
// i = w, w + workers, ... and summing its own counts.
Counts run_sharded(std::int64_t samples, int workers,
                   const std::function<void(std::int64_t, Counts&)>& body) {
  if (workers < 1) {
    throw Error(ErrorKind::InvalidParameter, "workers must be >= 1");
  }
  const int used = static_cast<int>(
      std::min<std::int64_t>(workers, std::max<std::int64_t>(samples, 1)));
  std::vector<Counts> partial(static_cast<std::size_t>(used));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(used));
  const auto shard = [&](int w) {
    try {
      for (std::int64_t i = w; i < samples; i += used) {
        body(i, partial[static_cast<std::size_t>(w)]);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (used == 1) {
    shard(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(used));
    for (int w = 0; w < used; ++w) threads.emplace_back(shard, w);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Counts total;
  for (const auto& c : partial) {
    total.detected += c.detected;
    total.criterion += c.criterion;
  }
  return total;
}

VolumeEstimate make_estimate(const Partition& p, int n, std::int64_t samples,
                             Counts counts, VolumeMethod method,
                             std::uint64_t seed) {
  VolumeEstimate e{p, n, samples, counts.detected, counts.criterion,
                   0.0, 0.0, method, seed};
  e.fraction = static_cast<double>(counts.detected) / static_cast<double>(samples);
  e.stddev_counts =
      std::sqrt(static_cast<double>(samples) * e.fraction * (1.0 - e.fraction));
  return e;
}

void require_samples(std::int64_t samples) {
  if (samples < 1) {
    throw Error(ErrorKind::InvalidCount, "samples must be >= 1");
  }
}

// Any certified 4-subset makes the whole set absolutely entangled.
bool any_subset_certified(const StateSet& set) {
  const int n = set.size();
  if (n == 4) return theorem1_scan(set).detected;
  std::array<int, 4> idx{};
  for (idx[0] = 0; idx[0] < n; ++idx[0]) {
    for (idx[1] = idx[0] + 1; idx[1] < n; ++idx[1]) {
      for (idx[2] = idx[1] + 1; idx[2] < n; ++idx[2]) {
        for (idx[3] = idx[2] + 1; idx[3] < n; ++idx[3]) {
          if (theorem1_scan(set.select(idx)).detected) return true;
        }
      }
    }
  }
  return false;
}

}  // namespace

const char* to_string(VolumeMethod m) {
  return m == VolumeMethod::CriterionOnly ? "criterion-only"
                                          : "criterion-then-optimizer";
}

int theorem3_threshold(int d1, int d2) {
  if (d1 < 2 || d2 < 2) {
    throw Error(ErrorKind::InvalidDimension, "factors must be >= 2");
  }
  return (d1 + 1) * (d2 + 1) / 2;
}

Theorem3Counts theorem3_counts(int d1, int d2, std::optional<int> n) {
  Theorem3Counts c;
  c.threshold = theorem3_threshold(d1, d2);
  c.quotient_parameters = (d1 * d1 - 1) * (d2 * d2 - 1);
  if (n) {
    if (*n < 1) throw Error(ErrorKind::InvalidCount, "N must be >= 1");
    c.constraints = 2LL * *n * (d1 - 1) * (d2 - 1);
  }
  return c;
}

VolumeEstimate estimate_volume_lower(const Partition& p, int n,
                                     std::int64_t samples, std::uint64_t seed,
                                     int workers) {
  if (!is_two_qubit(p) || n != 4) {
    throw Error(ErrorKind::Unsupported,
                "the criterion-only estimate covers 4 states at 2x2 only");
  }
  require_samples(samples);
  const Counts counts =
      run_sharded(samples, workers, [&](std::int64_t i, Counts& c) {
        const StateSet set = haar_random_state_set(
            4, 4, RunSeed{seed, static_cast<std::uint64_t>(i)});
        if (theorem1_scan(set).detected) {
          ++c.detected;
          ++c.criterion;
        }
      });
  return make_estimate(p, n, samples, counts, VolumeMethod::CriterionOnly, seed);
}

VolumeEstimate estimate_volume_lower(std::span<const StateSet> sets) {
  require_samples(static_cast<std::int64_t>(sets.size()));
  Counts counts;
  for (const auto& set : sets) {
    if (set.dim() != 4 || set.size() != 4) {
      throw Error(ErrorKind::Unsupported,
                  "the criterion-only estimate covers 4 states at 2x2 only");
    }
    if (theorem1_scan(set).detected) {
      ++counts.detected;
      ++counts.criterion;
    }
  }
  return make_estimate(Partition::bipartite(2, 2), 4,
                       static_cast<std::int64_t>(sets.size()), counts,
                       VolumeMethod::CriterionOnly, 0);
}

bool classify_aes(const StateSet& set, const Partition& p,
                  const OptimizerConfig& cfg, bool* by_criterion) {
  if (by_criterion) *by_criterion = false;
  if (is_two_qubit(p) && set.dim() == 4 && set.size() >= 4 &&
      any_subset_certified(set)) {
    if (by_criterion) *by_criterion = true;
    return true;
  }
  return minimize_total_entropy(set, p, cfg).classified_aes;
}

VolumeEstimate estimate_volume(const Partition& p, int n, std::int64_t samples,
                               std::uint64_t seed, const OptimizerConfig& cfg,
                               int workers) {
  if (n < 1) throw Error(ErrorKind::InvalidCount, "N must be >= 1");
  require_samples(samples);
  cfg.validate();
  const Counts counts =
      run_sharded(samples, workers, [&](std::int64_t i, Counts& c) {
        const RunSeed sample{seed, static_cast<std::uint64_t>(i)};
        const StateSet set = haar_random_state_set(p.dim(), n, sample);
        OptimizerConfig local = cfg;
        local.seed = sample.child(1);
        bool by_criterion = false;
        if (classify_aes(set, p, local, &by_criterion)) {
          ++c.detected;
          if (by_criterion) ++c.criterion;
        }
      });
  return make_estimate(p, n, samples, counts,
                       VolumeMethod::CriterionThenOptimizer, seed);
}

Eigen::MatrixXcd reduced_block(const Unitary& u) {
  const int d = u.dim();
  const Eigen::VectorXcd first = u.matrix().col(0);
  if (std::abs(std::abs(first(0)) - 1.0) > kUnitaryTolerance ||
      first.tail(d - 1).norm() > kUnitaryTolerance) {
    throw Error(ErrorKind::InvalidInput,
                "the unitary must map e_0 to e_0 up to a phase");
  }
  return u.matrix().block(1, 1, d - 1, d - 1).transpose();
}

BlockSums block_sums(const Eigen::MatrixXcd& us, const Partition& p, int n) {
  const int d = p.dim();
  if (us.rows() != d - 1 || us.cols() != d - 1) {
    throw Error(ErrorKind::InvalidDimension, "block must be (d-1) x (d-1)");
  }
  if (unitarity_residual(us) > kUnitaryTolerance) {
    throw Error(ErrorKind::InvalidInput, "block is not unitary");
  }
  if (n < 2 || n > d) {
    throw Error(ErrorKind::InvalidCount, "N must lie in [2, d]");
  }
  const int rows = n - 1;
  // weight(f) = sum over the first N - 1 rows of |b_{i, f}|^2.
  std::vector<double> weight(static_cast<std::size_t>(d), 0.0);
  for (int f = 1; f < d; ++f) {
    weight[static_cast<std::size_t>(f)] = us.col(f - 1).head(rows).squaredNorm();
  }
  BlockSums out;
  for (int f = 1; f < d; ++f) out.I += weight[static_cast<std::size_t>(f)];
  for (int i = 0; i + 1 < p.size(); ++i) {
    const int tail = p.tail_product(i);
    double s = 0.0;
    double b = 0.0;
    double t = 0.0;
    for (int f = 1; f < tail; ++f) s += weight[static_cast<std::size_t>(f)];
    for (int m = 1; m < p.factor(i); ++m) {
      b += weight[static_cast<std::size_t>(m * tail)];
      for (int j = 1; j < tail; ++j) {
        t += weight[static_cast<std::size_t>(m * tail + j)];
      }
    }
    out.S.push_back(s);
    out.B.push_back(b);
    out.T.push_back(t);
  }
  return out;
}

ChainReport necessary_condition_chain(const StateSet& set, const Unitary& u,
                                      const Partition& p) {
  if (set.dim() != p.dim() || u.dim() != p.dim()) {
    throw Error(ErrorKind::InvalidDimension, "dimension mismatch");
  }
  const AminReport amin = theorem4_amin(p);
  if (set.size() != amin.N) {
    throw Error(ErrorKind::InvalidCount,
                "expected the " + std::to_string(amin.N) + "-state family");
  }
  ChainReport report;
  report.a = std::abs(set[1][0]);
  const StateSet expected = theorem4_states(p, report.a);
  for (int i = 0; i < set.size(); ++i) {
    if ((set[i].amplitudes() - expected[i].amplitudes()).norm() >
        kSetMatchTolerance) {
      throw Error(ErrorKind::InvalidInput, "set is not a theorem4_states family");
    }
  }
  report.amin_max = amin.amin_max;
  report.inconclusive = !(report.a > amin.amin_max);
  report.sums = block_sums(reduced_block(u), p, set.size());
  for (std::size_t i = 0; i < amin.D.size(); ++i) {
    ChainLink link{report.sums.S[i], amin.D[i], report.sums.S[i] > amin.D[i] + kChainSlack};
    if (!link.holds && !report.first_violation) {
      report.first_violation = static_cast<int>(i) + 1;
    }
    report.links.push_back(link);
  }
  return report;
}

}  // namespace aeset
