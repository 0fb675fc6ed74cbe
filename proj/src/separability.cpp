#include "aeset/separability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace aeset {
namespace {

void require_dim(int state_dim, const Partition& p) {
  if (p.dim() != state_dim) {
    throw Error(ErrorKind::InvalidPartition,
                "partition " + p.str() + " does not match dimension " +
                    std::to_string(state_dim));
  }
}

}  // namespace

// ------------------------------------------------------------------ Unitary

double unitarity_residual(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXcd gram = m.adjoint() * m;
  return (gram - Eigen::MatrixXcd::Identity(m.rows(), m.cols()))
      .cwiseAbs()
      .maxCoeff();
}

Unitary::Unitary(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
    throw Error(ErrorKind::InvalidDimension, "a unitary must be square");
  }
  const double residual = unitarity_residual(entries_);
  if (!(residual <= kUnitaryTolerance)) {
    throw Error(ErrorKind::InvalidInput,
                "matrix is not unitary (residual " + std::to_string(residual) +
                    ")");
  }
}

Unitary Unitary::identity(int dim) {
  return Unitary(Eigen::MatrixXcd::Identity(dim, dim));
}

PureState Unitary::apply(const PureState& state) const {
  if (state.dim() != dim()) {
    throw Error(ErrorKind::InvalidDimension,
                "unitary and state dimensions differ");
  }
  return PureState::normalized(entries_ * state.amplitudes());
}

StateSet Unitary::apply(const StateSet& states) const {
  std::vector<PureState> out;
  out.reserve(static_cast<std::size_t>(states.size()));
  for (const auto& s : states) out.push_back(apply(s));
  return StateSet(states.dim(), std::move(out));
}

Unitary Unitary::adjoint() const { return Unitary(entries_.adjoint()); }

Unitary operator*(const Unitary& a, const Unitary& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::InvalidDimension, "unitary dimensions differ");
  }
  return Unitary(a.entries_ * b.entries_);
}

Unitary haar_random_unitary(int dim, CounterRng& rng) {
  if (dim < 1) {
    throw Error(ErrorKind::InvalidDimension, "unitary dimension must be >= 1");
  }
  Eigen::MatrixXcd z(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) z(i, j) = rng.normal_pair();
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(j) *= diag / mag;
  }
  // Re-orthonormalize to push the unitarity residual down to ~1e-16.
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < dim; ++j) {
      for (int i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
      q.col(j).normalize();
    }
  }
  return Unitary(std::move(q));
}

Unitary haar_random_unitary(int dim, RunSeed seed) {
  CounterRng rng(seed);
  return haar_random_unitary(dim, rng);
}

Unitary tensor_product(std::span<const Unitary> factors) {
  if (factors.empty()) {
    throw Error(ErrorKind::InvalidCount, "empty tensor product");
  }
  Eigen::MatrixXcd acc = factors.front().matrix();
  for (std::size_t f = 1; f < factors.size(); ++f) {
    const Eigen::MatrixXcd& b = factors[f].matrix();
    Eigen::MatrixXcd next(acc.rows() * b.rows(), acc.cols() * b.cols());
    for (Eigen::Index i = 0; i < acc.rows(); ++i) {
      for (Eigen::Index j = 0; j < acc.cols(); ++j) {
        next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
            acc(i, j) * b;
      }
    }
    acc = std::move(next);
  }
  return Unitary(std::move(acc));
}

PureState product_state(std::span<const Eigen::VectorXcd> factors) {
  if (factors.empty()) {
    throw Error(ErrorKind::InvalidCount, "empty product state");
  }
  Eigen::VectorXcd acc = factors.front();
  for (std::size_t f = 1; f < factors.size(); ++f) {
    const Eigen::VectorXcd& b = factors[f];
    Eigen::VectorXcd next(acc.size() * b.size());
    for (Eigen::Index i = 0; i < acc.size(); ++i) {
      next.segment(i * b.size(), b.size()) = acc(i) * b;
    }
    acc = std::move(next);
  }
  return PureState::normalized(std::move(acc));
}

// ------------------------------------------------------------- verdicts

ProductVerdict is_product_bipartite(const PureState& state, int d1, int d2,
                                    double tol) {
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "tolerance must be positive");
  }
  const Eigen::VectorXd s = schmidt_coefficients(state, d1, d2);
  const double residual = s.size() > 1 ? s(1) : 0.0;
  return {residual < tol, residual};
}

ProductVerdict is_fully_product(const PureState& state, const Partition& p,
                                double tol) {
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "tolerance must be positive");
  }
  require_dim(state.dim(), p);
  Eigen::VectorXcd rest = state.amplitudes();
  double residual = 0.0;
  for (int m = 0; m + 1 < p.size(); ++m) {
    const int rows = p.factor(m);
    const int cols = static_cast<int>(rest.size()) / rows;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(detail::reshape(rest, rows, cols),
                                           Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    residual = std::max(residual, s.size() > 1 ? s(1) : 0.0);
    // M ~ s_1 u_1 v_1^dagger, so the remainder factor is conj(v_1).
    rest = svd.matrixV().col(0).conjugate();
  }
  return {residual < tol, residual};
}

double cross_ratio_residual(const PureState& state, int d1, int d2) {
  if (d1 < 2 || d2 < 2 || d1 * d2 != state.dim()) {
    throw Error(ErrorKind::InvalidPartition, "cut does not match dimension");
  }
  const auto& a = state.amplitudes();
  double worst = 0.0;
  for (int n = 1; n < d1; ++n) {
    for (int k = 1; k < d2; ++k) {
      worst = std::max(worst,
                       std::abs(a(0) * a(n * d2 + k) - a(k) * a(n * d2)));
    }
  }
  return worst;
}

// ------------------------------------------------------ disentangling map

Unitary disentangling_unitary(const StateSet& states, const Partition& p) {
  require_dim(states.dim(), p);
  const int n = states.size();
  const int dprime = p.max_factor();
  if (n > dprime + 1) {
    throw Error(ErrorKind::BoundExceeded,
                std::to_string(n) + " states exceed max(d_i) + 1 = " +
                    std::to_string(dprime + 1));
  }
  const auto fs = p.factors();
  const int big = static_cast<int>(
      std::find(fs.begin(), fs.end(), dprime) - fs.begin());
  const int other = big == 0 ? 1 : 0;
  const int dim = p.dim();

  const int spanned = std::min(n, dprime);
  std::vector<int> head(static_cast<std::size_t>(spanned));
  for (int i = 0; i < spanned; ++i) head[static_cast<std::size_t>(i)] = i;
  const TriangularForm tf = triangularize(states.select(head));

  const int cols = spanned + (n > dprime ? 1 : 0);
  Eigen::MatrixXcd domain(dim, cols);
  Eigen::MatrixXcd target = Eigen::MatrixXcd::Zero(dim, cols);
  domain.leftCols(spanned) = tf.basis;

  std::vector<int> digits(static_cast<std::size_t>(p.size()), 0);
  for (int j = 0; j < spanned; ++j) {
    digits[static_cast<std::size_t>(big)] = j;
    target(p.flat_index(digits), j) = 1.0;
  }

  if (n > dprime) {
    const Eigen::VectorXcd& phi = states[dprime].amplitudes();
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(spanned);
    Eigen::VectorXcd resid = phi;
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXcd proj = tf.basis.adjoint() * resid;
      c += proj;
      resid -= tf.basis * proj;
    }
    const double beta = resid.norm();
    const double alpha = c.norm();
    Eigen::VectorXcd next;
    if (beta >= kDependenceTolerance) {
      next = resid / beta;
    } else {
      next = complete_to_unitary(tf.basis).col(spanned);
    }
    // With alpha = 0, Psi may be anything; take xi_1.
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(spanned);
    if (alpha >= kDependenceTolerance) {
      psi = c / alpha;
    } else {
      psi(0) = 1.0;
    }
    // |psi>_big (x) |1>_other (x) |0...0>: orthogonal to every earlier target
    // and keeps the image alpha |psi,0> + beta |psi,1> fully product.
    digits.assign(digits.size(), 0);
    digits[static_cast<std::size_t>(other)] = 1;
    for (int j = 0; j < spanned; ++j) {
      digits[static_cast<std::size_t>(big)] = j;
      target(p.flat_index(digits), spanned) = psi(j);
    }
    domain.col(spanned) = next;
  }

  const Eigen::MatrixXcd qa = complete_to_unitary(domain);
  const Eigen::MatrixXcd qb = complete_to_unitary(target);
  return Unitary(qb * qa.adjoint());
}

}  // namespace aeset
