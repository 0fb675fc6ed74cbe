#include "aeset/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace aeset {
namespace {

void require_open_unit(double a, const char* name) {
  if (!(a > 0.0 && a < 1.0)) {
    throw Error(ErrorKind::InvalidParameter,
                std::string(name) + " must lie in (0, 1), got " +
                    std::to_string(a));
  }
}

int family_size(const Partition& p) {
  int n = 2 - p.size();
  for (int f : p.factors()) n += f;
  return n;
}

void collect_partitions(int remaining, int min_factor, std::vector<int>& prefix,
                        std::vector<std::vector<int>>& out) {
  if (remaining == 1) {
    if (prefix.size() >= 2) out.push_back(prefix);
    return;
  }
  for (int f = min_factor; f <= remaining; ++f) {
    if (remaining % f != 0) continue;
    prefix.push_back(f);
    collect_partitions(remaining / f, f, prefix, out);
    prefix.pop_back();
  }
}

bool is_detected(const StateSet& subset) {
  return theorem1_scan(subset).detected;
}

}  // namespace

StateSet theorem4_states(const Partition& p, double a) {
  require_open_unit(a, "a");
  const int n = family_size(p);
  const int d = p.dim();
  if (n > d) {
    throw Error(ErrorKind::TooManyStates,
                "family needs " + std::to_string(n) + " states but d = " +
                    std::to_string(d));
  }
  const double rest = std::sqrt(1.0 - a * a);
  std::vector<PureState> states;
  states.reserve(static_cast<std::size_t>(n));
  states.push_back(PureState::basis(d, 0));
  for (int i = 1; i < n; ++i) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    v(0) = a;
    v(i) = rest;
    states.push_back(PureState::normalized(std::move(v)));
  }
  return StateSet(d, std::move(states));
}

StateSet special_set(int d1, int d2, double c) {
  return theorem4_states(Partition::bipartite(d1, d2), c);
}

AminReport theorem4_amin(const Partition& p) {
  const int k = p.size();
  const double eps = 1.0 / (k - 1);
  AminReport r{p, family_size(p), {}, {}, 0.0, 0.0};
  for (int i = 1; i <= k - 1; ++i) {
    double D = static_cast<double>(k - 1 - i) / (k - 1);
    for (int j = i + 1; j <= k; ++j) D += p.factor(j - 1) - 1;
    const double di = p.factor(i - 1) - 1;
    r.D.push_back(D);
    r.terms.push_back(std::sqrt(di * D / ((di + eps) * (D + eps))));
  }
  r.amin_max = *std::max_element(r.terms.begin(), r.terms.end());
  r.amin_min = *std::min_element(r.terms.begin(), r.terms.end());
  return r;
}

double bipartite_amin_for_count(int d1, int d2, int n) {
  if (d1 < 2 || d2 < 2) {
    throw Error(ErrorKind::InvalidPartition, "factors must be >= 2");
  }
  if (n < d1 + d2 || n > d1 * d2) {
    throw Error(ErrorKind::InvalidCount, "N must lie in [d1 + d2, d1 d2]");
  }
  return std::sqrt(static_cast<double>((d1 - 1) * (d2 - 1)) /
                   (static_cast<double>(n - d1) * (n - d2)));
}

std::vector<std::vector<int>> multiplicative_partitions(int d) {
  if (d < 4) {
    throw Error(ErrorKind::NoPartition,
                std::to_string(d) + " has no nontrivial factorization");
  }
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  collect_partitions(d, 2, prefix, out);
  if (out.empty()) {
    throw Error(ErrorKind::NoPartition, std::to_string(d) + " is prime");
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  });
  return out;
}

AminTable amin_table(int d) {
  AminTable table;
  for (auto& factors : multiplicative_partitions(d)) {
    AminReport r = theorem4_amin(Partition(std::move(factors)));
    table.all_N = std::max(table.all_N, r.N);
    table.all_amin_max = std::max(table.all_amin_max, r.amin_max);
    table.all_amin_min = std::max(table.all_amin_min, r.amin_min);
    table.rows.push_back(std::move(r));
  }
  return table;
}

double tetrahedron_determinant(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                               const Eigen::Vector3d& c,
                               const Eigen::Vector3d& d) {
  // det [[x y z 1]...] equals det of the edge vectors from a.
  Eigen::Matrix3d edges;
  edges.row(0) = b - a;
  edges.row(1) = c - a;
  edges.row(2) = d - a;
  return std::abs(edges.determinant());
}

namespace {

// Smallest |det| over 4-subsets that include `cand` and three of `pts`.
double min_det_with(const std::vector<Eigen::Vector3d>& pts,
                    const Eigen::Vector3d& cand) {
  double worst = std::numeric_limits<double>::infinity();
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        worst = std::min(worst,
                         tetrahedron_determinant(pts[i], pts[j], pts[k], cand));
      }
    }
  }
  return worst;
}

}  // namespace

SpherePoints validate_general_position(std::vector<Eigen::Vector3d> points,
                                       double tol) {
  if (points.size() < 4) {
    throw Error(ErrorKind::InvalidCount, "need at least 4 sphere points");
  }
  for (const auto& v : points) {
    if (std::abs(v.norm() - 1.0) > kNormTolerance) {
      throw Error(ErrorKind::InvalidInput, "sphere point is not a unit vector");
    }
  }
  SpherePoints out{{}, std::numeric_limits<double>::infinity()};
  for (const auto& v : points) {
    if (out.points.size() >= 3) {
      out.min_tetra_det = std::min(out.min_tetra_det, min_det_with(out.points, v));
    }
    out.points.push_back(v);
  }
  if (!(out.min_tetra_det >= tol)) {
    throw Error(ErrorKind::InvalidInput,
                "four of the points are (nearly) coplanar: |det| = " +
                    std::to_string(out.min_tetra_det));
  }
  return out;
}

SpherePoints sphere_points_general_position(int n, RunSeed seed, double tol) {
  if (n < 4) {
    throw Error(ErrorKind::InvalidCount, "need at least 4 sphere points");
  }
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "tolerance must be positive");
  }
  constexpr int kMaxAttempts = 1000000;
  CounterRng rng(seed);
  SpherePoints out{{}, std::numeric_limits<double>::infinity()};
  int attempts = 0;
  while (static_cast<int>(out.points.size()) < n) {
    if (++attempts > kMaxAttempts) {
      throw Error(ErrorKind::Internal,
                  "could not place sphere points in general position");
    }
    const Complex xy = rng.normal_pair();
    const double z = rng.normal_pair().real();
    Eigen::Vector3d v(xy.real(), xy.imag(), z);
    const double norm = v.norm();
    if (norm == 0.0) continue;
    v /= norm;
    if (out.points.size() >= 3) {
      const double det = min_det_with(out.points, v);
      if (det < tol) continue;
      out.min_tetra_det = std::min(out.min_tetra_det, det);
    }
    out.points.push_back(v);
  }
  return out;
}

StateSet theorem2_states(const SpherePoints& pts, double a) {
  require_open_unit(a, "a");
  const double rest = std::sqrt(1.0 - a * a);
  std::vector<PureState> states;
  states.reserve(pts.points.size());
  for (const auto& v : pts.points) {
    Eigen::VectorXcd amp(4);
    amp << a, rest * v.x(), rest * v.y(), rest * v.z();
    states.push_back(PureState::normalized(std::move(amp)));
  }
  return StateSet(4, std::move(states));
}

StateSet n5_symmetric_set(double b) {
  require_open_unit(b, "b");
  const double rest = std::sqrt(1.0 - b * b);
  std::vector<PureState> states;
  states.push_back(PureState::basis(4, 0));
  for (int j = 1; j <= 3; ++j) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v(0) = b;
    v(j) = rest;
    states.push_back(PureState::normalized(std::move(v)));
  }
  Eigen::VectorXcd v(4);
  const double third = std::sqrt((1.0 - b * b) / 3.0);
  v << b, third, third, third;
  states.push_back(PureState::normalized(std::move(v)));
  return StateSet(4, std::move(states));
}

CriticalSearchResult critical_a_search(
    const FamilyGenerator& family,
    const std::vector<std::array<int, 4>>& subsets, double resolution) {
  if (!(resolution > 0.0 && resolution < 0.5)) {
    throw Error(ErrorKind::InvalidParameter, "resolution must lie in (0, 0.5)");
  }
  if (subsets.empty()) {
    throw Error(ErrorKind::InvalidCount, "no subsets requested");
  }
  CriticalSearchResult result;
  bool all_found = true;
  double worst = 0.0;
  for (const auto& subset : subsets) {
    const auto detect = [&](double a) {
      return is_detected(family(a).select(subset));
    };
    double hi = 1.0 - resolution;
    if (!detect(hi)) {
      result.per_subset.push_back(std::nullopt);
      all_found = false;
      continue;
    }
    double lo = 0.0;
    while (hi - lo > resolution) {
      const double mid = 0.5 * (lo + hi);
      if (detect(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    result.per_subset.push_back(hi);
    worst = std::max(worst, hi);
  }
  if (all_found) result.critical = worst;
  return result;
}

AsymptoticThreshold theorem2_asymptotic_threshold(
    const SpherePoints& pts, const std::array<int, 4>& subset) {
  const int n = static_cast<int>(pts.points.size());
  for (int idx : subset) {
    if (idx < 0 || idx >= n) {
      throw Error(ErrorKind::InvalidParameter, "subset index out of range");
    }
  }
  const Eigen::Vector3d& v0 = pts.points[static_cast<std::size_t>(subset[0])];
  Eigen::Matrix3d u;  // columns: normalized u_1, u_2, u_3
  for (int i = 1; i <= 3; ++i) {
    const Eigen::Vector3d diff =
        pts.points[static_cast<std::size_t>(subset[static_cast<std::size_t>(i)])] - v0;
    if (diff.norm() < kCriterionZero) {
      throw Error(ErrorKind::Internal, "repeated point in subset");
    }
    u.col(i - 1) = diff.normalized();
  }
  Eigen::Matrix3d coeffs;
  Eigen::Matrix3d basis;
  std::array<bool, 3> dependent{};
  detail::gram_schmidt(u, coeffs, basis, dependent);

  AsymptoticThreshold out;
  out.U = coeffs;
  const double u21 = std::abs(coeffs(1, 0));
  const double u22 = std::abs(coeffs(1, 1));
  const double u31 = std::abs(coeffs(2, 0));
  const double u32 = std::abs(coeffs(2, 1));
  const double u33 = std::abs(coeffs(2, 2));
  if (u22 < kCriterionZero || u33 < kCriterionZero) {
    throw Error(ErrorKind::Internal, "subset points do not form a tetrahedron");
  }
  const double first = (u21 + 1.0) / u22;
  const double second = u31 / u33 + u32 / u33 * first + 1.0 / u33;
  out.L_prime = 1.0 + first * first + second * second;
  out.o = criterion_threshold(out.L_prime);
  return out;
}

}  // namespace aeset
