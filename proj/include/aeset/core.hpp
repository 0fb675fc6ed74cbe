#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "aeset/error.hpp"
#include "aeset/rng.hpp"

namespace aeset {

using Complex = std::complex<double>;

inline constexpr double kNormTolerance = 1e-12;
// Gram-Schmidt residuals below this norm mark a state as linearly dependent.
inline constexpr double kDependenceTolerance = 1e-10;
// Reduced-state eigenvalues below this contribute nothing to the entropy.
inline constexpr double kSpectrumCutoff = 1e-15;

/// Unit vector in C^d, d >= 2, over the flat computational basis.
class PureState {
 public:
  /// Takes ownership of already-normalized amplitudes; throws if the norm is
  /// off by more than kNormTolerance.
  explicit PureState(Eigen::VectorXcd amplitudes);

  /// Normalizes `raw` first. Throws on a zero vector.
  static PureState normalized(Eigen::VectorXcd raw);
  static PureState basis(int dim, int index);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Complex operator[](int i) const { return amplitudes_[i]; }

  friend bool operator==(const PureState& a, const PureState& b) {
    return a.amplitudes_ == b.amplitudes_;
  }

 private:
  Eigen::VectorXcd amplitudes_;
};

/// Tensor factor structure (d_1, ..., d_k) of C^d.
///
/// Digits are 0-based and subsystem 1 is the most significant:
/// flat = sum_m digit_m * prod_{m' > m} d_{m'}.
class Partition {
 public:
  explicit Partition(std::vector<int> factors);
  static Partition bipartite(int d1, int d2) { return Partition({d1, d2}); }
  /// Parses "2x2x8".
  static Partition parse(std::string_view text);

  std::span<const int> factors() const { return factors_; }
  int factor(int m) const { return factors_[static_cast<std::size_t>(m)]; }
  int size() const { return static_cast<int>(factors_.size()); }
  int dim() const { return dim_; }
  int max_factor() const;
  /// prod_{m' > m} d_{m'}; tail_product(-1) == dim().
  int tail_product(int m) const;

  int flat_index(std::span<const int> digits) const;
  std::vector<int> digits(int flat) const;

  /// Factors sorted into nondecreasing order.
  Partition canonical() const;
  std::string str() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> factors_;
  int dim_ = 1;
};

/// Ordered list of N >= 1 states of one common dimension.
class StateSet {
 public:
  StateSet(int dim, std::vector<PureState> states);
  explicit StateSet(std::vector<PureState> states);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(states_.size()); }
  const PureState& operator[](int i) const {
    return states_[static_cast<std::size_t>(i)];
  }
  const std::vector<PureState>& states() const { return states_; }
  auto begin() const { return states_.begin(); }
  auto end() const { return states_.end(); }

  /// States picked in the given order (0-based indices).
  StateSet select(std::span<const int> indices) const;
  /// dim x N matrix with the states as columns.
  Eigen::MatrixXcd as_columns() const;

  friend bool operator==(const StateSet&, const StateSet&) = default;

 private:
  int dim_;
  std::vector<PureState> states_;
};

/// Gram-Schmidt presentation phi_i = sum_{j <= i} c_ij xi_j.
struct TriangularForm {
  Eigen::MatrixXcd coeffs;  // N x N, lower triangular, real diagonal >= 0
  Eigen::MatrixXcd basis;   // dim x N, orthonormal columns xi_j
  int residual_rank = 0;
  std::vector<bool> dependent;
};

PureState haar_random_state(int dim, RunSeed seed);
PureState haar_random_state(int dim, CounterRng& rng);
/// Draws the N states one after another from a single stream, so the first
/// M states of an N-set equal the M-set drawn with the same seed.
StateSet haar_random_state_set(int dim, int count, RunSeed seed);

/// Singular values of the d1 x d2 amplitude matrix, descending.
Eigen::VectorXd schmidt_coefficients(const PureState& state, int d1, int d2);
/// Von Neumann entropy of either reduced state, in bits.
double entanglement_entropy(const PureState& state, int d1, int d2);
/// Tr rho_1^2 for the d1 | d2 cut.
double reduced_purity(const PureState& state, int d1, int d2);
/// Entry m is the entropy of subsystem m against all the others.
std::vector<double> subsystem_entropies(const PureState& state,
                                        const Partition& p);

/// Gram-Schmidt in the given order. Requires N <= dim.
TriangularForm triangularize(const StateSet& states);

/// Extends orthonormal columns to a full dim x dim unitary by Gram-Schmidt over
/// canonical basis vectors in index order; candidates whose residual falls
/// below kDependenceTolerance are skipped.
Eigen::MatrixXcd complete_to_unitary(const Eigen::MatrixXcd& columns);

namespace detail {

/// rows x cols matrix with M(i, j) = amplitudes[i * cols + j].
Eigen::MatrixXcd reshape(const Eigen::Ref<const Eigen::VectorXcd>& amplitudes,
                         int rows, int cols);
/// d_m x (d / d_m) matrix with subsystem m as the row index.
Eigen::MatrixXcd subsystem_matrix(
    const Eigen::Ref<const Eigen::VectorXcd>& amplitudes, const Partition& p,
    int m);

/// -sum lambda log2 lambda over squared singular values.
double entropy_from_singular_values(const Eigen::VectorXd& singular_values);

/// Entropy across a rows | cols cut of a unit vector. Uses a closed form when
/// either side is a qubit and a Jacobi SVD otherwise.
double cut_entropy(const Eigen::Ref<const Eigen::VectorXcd>& amplitudes,
                   int rows, int cols);
/// 1 - Tr rho^2 across a rows | cols cut, as twice the sum of squared 2x2
/// minors (Cauchy-Binet). Smooth everywhere.
double cut_linear_entropy(const Eigen::Ref<const Eigen::VectorXcd>& amplitudes,
                          int rows, int cols);
double binary_entropy_from_det(double det);
/// Entropy and linear entropy of the state whose amplitude matrix is `m`.
double matrix_entropy(const Eigen::MatrixXcd& m);
double matrix_linear_entropy(const Eigen::MatrixXcd& m);

/// Gram-Schmidt kernel shared by the dynamic and fixed-size paths.
/// `states` holds one state per column.
template <class StatesMat, class CoeffMat, class BasisMat, class Flags>
int gram_schmidt(const StatesMat& states, CoeffMat& coeffs, BasisMat& basis,
                 Flags& dependent) {
  const Eigen::Index dim = states.rows();
  const Eigen::Index n = states.cols();
  coeffs.setZero(n, n);
  basis.setZero(dim, n);
  int rank = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto r = states.col(i).eval();
    // Two passes keep the columns orthogonal to machine precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < i; ++j) {
        const auto proj = basis.col(j).dot(r);
        coeffs(i, j) += proj;
        r -= proj * basis.col(j);
      }
    }
    const double norm = r.norm();
    if (norm >= kDependenceTolerance) {
      coeffs(i, i) = norm;
      basis.col(i) = r / norm;
      dependent[static_cast<std::size_t>(i)] = false;
      ++rank;
      continue;
    }
    dependent[static_cast<std::size_t>(i)] = true;
    bool completed = false;
    for (Eigen::Index e = 0; e < dim && !completed; ++e) {
      auto cand = decltype(r)::Zero(dim).eval();
      cand(e) = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index j = 0; j < i; ++j) {
          cand -= basis.col(j).dot(cand) * basis.col(j);
        }
      }
      const double cn = cand.norm();
      if (cn >= kDependenceTolerance) {
        basis.col(i) = cand / cn;
        completed = true;
      }
    }
    if (!completed) {
      throw Error(ErrorKind::Internal, "orthonormal completion failed");
    }
  }
  return rank;
}

}  // namespace detail
}  // namespace aeset
