#pragma once

#include <span>

#include <Eigen/Dense>

#include "aeset/core.hpp"

namespace aeset {

inline constexpr double kUnitaryTolerance = 1e-12;
inline constexpr double kDefaultProductTolerance = 1e-9;

/// d x d matrix with U^dagger U = I within kUnitaryTolerance entrywise.
/// Global phase is irrelevant for every question asked here, so U(d)
/// representatives are accepted.
class Unitary {
 public:
  explicit Unitary(Eigen::MatrixXcd entries);
  static Unitary identity(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

  PureState apply(const PureState& state) const;
  StateSet apply(const StateSet& states) const;
  Unitary adjoint() const;

  friend Unitary operator*(const Unitary& a, const Unitary& b);

 private:
  Eigen::MatrixXcd entries_;
};

/// Largest |(U^dagger U - I)_ij|.
double unitarity_residual(const Eigen::MatrixXcd& m);

/// Haar-distributed unitary (QR of a complex Ginibre matrix with the
/// R-diagonal phases removed).
Unitary haar_random_unitary(int dim, RunSeed seed);
Unitary haar_random_unitary(int dim, CounterRng& rng);

/// V_1 (x) V_2 (x) ... (x) V_k, first factor most significant.
Unitary tensor_product(std::span<const Unitary> factors);

/// Tensor product of unit vectors, first factor most significant.
PureState product_state(std::span<const Eigen::VectorXcd> factors);

struct ProductVerdict {
  bool is_product = false;
  double residual = 0.0;
};

/// Residual is the second-largest Schmidt coefficient of the d1 x d2 reshape.
ProductVerdict is_product_bipartite(const PureState& state, int d1, int d2,
                                    double tol = kDefaultProductTolerance);

/// Nested cascade of cuts (d_1 | rest), then (d_2 | rest') on the dominant
/// component of the remainder, and so on. Residual is the max over cuts.
ProductVerdict is_fully_product(const PureState& state, const Partition& p,
                                double tol = kDefaultProductTolerance);

/// max |a_0 a_{n d2 + k} - a_k a_{n d2}| over n in [1, d1), k in [1, d2).
/// These conditions characterise product states only when a_0 != 0; the
/// Schmidt residual is the robust test.
double cross_ratio_residual(const PureState& state, int d1, int d2);

/// Global unitary mapping every state of a set of at most max(d_i) + 1 states
/// to a fully product state.
///
/// With d' = max(d_i) on subsystem m, the first min(N, d') states are spanned
/// by xi_1..xi_d' which go to |j>_m (x) |0...0>. A (d'+1)-th state
/// alpha Psi + beta xi_{d'+1} has xi_{d'+1} sent to |psi>_m (x) |1...1>, where
/// |psi>_m (x) |0...0> is the image of Psi. The rest is completed arbitrarily.
Unitary disentangling_unitary(const StateSet& states, const Partition& p);

}  // namespace aeset
