#include "aeset/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace aeset {
namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;

constexpr int kMaxDim = 1 << 16;

void require_cut(int dim, int d1, int d2) {
  if (d1 < 2 || d2 < 2 || static_cast<long long>(d1) * d2 != dim) {
    throw Error(ErrorKind::InvalidPartition,
                "cut " + std::to_string(d1) + "x" + std::to_string(d2) +
                    " does not match dimension " + std::to_string(dim));
  }
}

double xlog2x(double x) { return x * std::log2(x); }

// Sum of squared 2x2 minors of M (= det(M M^dagger) for a two-row M).
template <class M>
double minor_square_sum(const M& m) {
  double total = 0.0;
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = i + 1; k < rows; ++k) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index l = j + 1; l < cols; ++l) {
          total += std::norm(m(i, j) * m(k, l) - m(i, l) * m(k, j));
        }
      }
    }
  }
  return total;
}

template <class M>
double matrix_entropy_impl(const M& m) {
  if (m.rows() == 2 || m.cols() == 2) {
    return detail::binary_entropy_from_det(minor_square_sum(m));
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return detail::entropy_from_singular_values(svd.singularValues());
}

}  // namespace

// ---------------------------------------------------------------- PureState

PureState::PureState(Eigen::VectorXcd amplitudes)
    : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 2) {
    throw Error(ErrorKind::InvalidDimension, "state dimension must be >= 2");
  }
  const double norm2 = amplitudes_.squaredNorm();
  if (!(std::abs(norm2 - 1.0) <= kNormTolerance)) {
    throw Error(ErrorKind::InvalidInput,
                "state is not normalized (|psi|^2 = " + std::to_string(norm2) +
                    ")");
  }
}

PureState PureState::normalized(Eigen::VectorXcd raw) {
  const double norm = raw.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorKind::InvalidInput, "cannot normalize a zero vector");
  }
  raw /= norm;
  return PureState(std::move(raw));
}

PureState PureState::basis(int dim, int index) {
  if (dim < 2) {
    throw Error(ErrorKind::InvalidDimension, "state dimension must be >= 2");
  }
  if (index < 0 || index >= dim) {
    throw Error(ErrorKind::InvalidParameter, "basis index out of range");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v));
}

// ---------------------------------------------------------------- Partition

Partition::Partition(std::vector<int> factors) : factors_(std::move(factors)) {
  if (factors_.size() < 2) {
    throw Error(ErrorKind::InvalidPartition,
                "a partition needs at least two factors");
  }
  long long product = 1;
  for (int f : factors_) {
    if (f < 2) {
      throw Error(ErrorKind::InvalidPartition, "partition factors must be >= 2");
    }
    product *= f;
    if (product > kMaxDim) {
      throw Error(ErrorKind::InvalidPartition, "partition dimension too large");
    }
  }
  dim_ = static_cast<int>(product);
}

Partition Partition::parse(std::string_view text) {
  std::vector<int> factors;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find_first_of("xX", pos);
    const std::string_view token =
        text.substr(pos, next == std::string_view::npos ? text.size() - pos
                                                        : next - pos);
    int value = 0;
    const auto [end, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() ||
        end != token.data() + token.size()) {
      throw Error(ErrorKind::InvalidPartition,
                  "malformed partition '" + std::string(text) +
                      "' (expected e.g. 2x2x8)");
    }
    factors.push_back(value);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return Partition(std::move(factors));
}

int Partition::max_factor() const {
  return *std::max_element(factors_.begin(), factors_.end());
}

int Partition::tail_product(int m) const {
  int tail = 1;
  for (int j = size() - 1; j > m; --j) tail *= factor(j);
  return tail;
}

int Partition::flat_index(std::span<const int> digits) const {
  if (static_cast<int>(digits.size()) != size()) {
    throw Error(ErrorKind::InvalidPartition, "digit count mismatch");
  }
  int flat = 0;
  for (int m = 0; m < size(); ++m) {
    const int digit = digits[static_cast<std::size_t>(m)];
    if (digit < 0 || digit >= factor(m)) {
      throw Error(ErrorKind::InvalidParameter, "digit out of range");
    }
    flat = flat * factor(m) + digit;
  }
  return flat;
}

std::vector<int> Partition::digits(int flat) const {
  if (flat < 0 || flat >= dim_) {
    throw Error(ErrorKind::InvalidParameter, "flat index out of range");
  }
  std::vector<int> out(factors_.size());
  for (int m = size() - 1; m >= 0; --m) {
    out[static_cast<std::size_t>(m)] = flat % factor(m);
    flat /= factor(m);
  }
  return out;
}

Partition Partition::canonical() const {
  std::vector<int> sorted = factors_;
  std::sort(sorted.begin(), sorted.end());
  return Partition(std::move(sorted));
}

std::string Partition::str() const {
  std::string out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(factors_[i]);
  }
  return out;
}

// ----------------------------------------------------------------- StateSet

StateSet::StateSet(int dim, std::vector<PureState> states)
    : dim_(dim), states_(std::move(states)) {
  if (states_.empty()) {
    throw Error(ErrorKind::InvalidCount, "a state set needs at least one state");
  }
  for (const auto& s : states_) {
    if (s.dim() != dim_) {
      throw Error(ErrorKind::InvalidDimension,
                  "all states in a set must share one dimension");
    }
  }
}

StateSet::StateSet(std::vector<PureState> states)
    : StateSet(states.empty() ? 0 : states.front().dim(), std::move(states)) {}

StateSet StateSet::select(std::span<const int> indices) const {
  std::vector<PureState> out;
  out.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= size()) {
      throw Error(ErrorKind::InvalidParameter, "state index out of range");
    }
    out.push_back(states_[static_cast<std::size_t>(i)]);
  }
  return StateSet(dim_, std::move(out));
}

Eigen::MatrixXcd StateSet::as_columns() const {
  Eigen::MatrixXcd m(dim_, size());
  for (int i = 0; i < size(); ++i) m.col(i) = (*this)[i].amplitudes();
  return m;
}

// ----------------------------------------------------------------- sampling

PureState haar_random_state(int dim, CounterRng& rng) {
  if (dim < 2) {
    throw Error(ErrorKind::InvalidDimension, "state dimension must be >= 2");
  }
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.normal_pair();
  return PureState::normalized(std::move(v));
}

PureState haar_random_state(int dim, RunSeed seed) {
  CounterRng rng(seed);
  return haar_random_state(dim, rng);
}

StateSet haar_random_state_set(int dim, int count, RunSeed seed) {
  if (count < 1) {
    throw Error(ErrorKind::InvalidCount, "state count must be >= 1");
  }
  if (dim < 2) {
    throw Error(ErrorKind::InvalidDimension, "state dimension must be >= 2");
  }
  CounterRng rng(seed);
  std::vector<PureState> states;
  states.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) states.push_back(haar_random_state(dim, rng));
  return StateSet(dim, std::move(states));
}

// ------------------------------------------------------------------ entropy

Eigen::VectorXd schmidt_coefficients(const PureState& state, int d1, int d2) {
  require_cut(state.dim(), d1, d2);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      detail::reshape(state.amplitudes(), d1, d2));
  return svd.singularValues();
}

double entanglement_entropy(const PureState& state, int d1, int d2) {
  require_cut(state.dim(), d1, d2);
  return detail::cut_entropy(state.amplitudes(), d1, d2);
}

double reduced_purity(const PureState& state, int d1, int d2) {
  require_cut(state.dim(), d1, d2);
  return 1.0 - detail::cut_linear_entropy(state.amplitudes(), d1, d2);
}

std::vector<double> subsystem_entropies(const PureState& state,
                                        const Partition& p) {
  if (p.dim() != state.dim()) {
    throw Error(ErrorKind::InvalidPartition,
                "partition " + p.str() + " does not match dimension " +
                    std::to_string(state.dim()));
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(p.size()));
  for (int m = 0; m < p.size(); ++m) {
    out.push_back(matrix_entropy_impl(
        detail::subsystem_matrix(state.amplitudes(), p, m)));
  }
  return out;
}

// ------------------------------------------------------------ Gram-Schmidt

TriangularForm triangularize(const StateSet& states) {
  if (states.size() > states.dim()) {
    throw Error(ErrorKind::TooManyStates,
                std::to_string(states.size()) + " states exceed dimension " +
                    std::to_string(states.dim()));
  }
  TriangularForm tf;
  tf.dependent.assign(static_cast<std::size_t>(states.size()), false);
  tf.residual_rank =
      detail::gram_schmidt(states.as_columns(), tf.coeffs, tf.basis,
                           tf.dependent);
  return tf;
}

Eigen::MatrixXcd complete_to_unitary(const Eigen::MatrixXcd& columns) {
  const Eigen::Index dim = columns.rows();
  if (columns.cols() > dim) {
    throw Error(ErrorKind::TooManyStates, "more columns than dimension");
  }
  Eigen::MatrixXcd out(dim, dim);
  out.leftCols(columns.cols()) = columns;
  Eigen::Index filled = columns.cols();
  for (Eigen::Index e = 0; e < dim && filled < dim; ++e) {
    Eigen::VectorXcd cand = Eigen::VectorXcd::Zero(dim);
    cand(e) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < filled; ++j) {
        cand -= out.col(j).dot(cand) * out.col(j);
      }
    }
    const double norm = cand.norm();
    if (norm < kDependenceTolerance) continue;
    out.col(filled++) = cand / norm;
  }
  if (filled != dim) {
    throw Error(ErrorKind::Internal, "unitary completion failed");
  }
  return out;
}

// ------------------------------------------------------------------- detail

namespace detail {

Eigen::MatrixXcd reshape(const Eigen::Ref<const Eigen::VectorXcd>& amplitudes,
                         int rows, int cols) {
  return RowMajorMap(amplitudes.data(), rows, cols);
}

Eigen::MatrixXcd subsystem_matrix(
    const Eigen::Ref<const Eigen::VectorXcd>& amplitudes, const Partition& p,
    int m) {
  const int dm = p.factor(m);
  const int tail = p.tail_product(m);
  const int block = dm * tail;
  Eigen::MatrixXcd out(dm, p.dim() / dm);
  for (int f = 0; f < p.dim(); ++f) {
    const int hi = f / block;
    const int digit = (f / tail) % dm;
    const int lo = f % tail;
    out(digit, hi * tail + lo) = amplitudes(f);
  }
  return out;
}

double entropy_from_singular_values(const Eigen::VectorXd& singular_values) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    const double lambda = singular_values(i) * singular_values(i);
    if (lambda >= kSpectrumCutoff) h -= xlog2x(lambda);
  }
  return std::max(h, 0.0);
}

double binary_entropy_from_det(double det) {
  // Eigenvalues of a unit-trace 2x2 density matrix with determinant det;
  // the small one is formed without cancellation.
  const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * det));
  const double small = 2.0 * det / (1.0 + disc);
  if (small < kSpectrumCutoff) return 0.0;
  const double large = 1.0 - small;
  return std::max(0.0, -xlog2x(small) -
                           large * std::log1p(-small) / std::numbers::ln2);
}

double matrix_entropy(const Eigen::MatrixXcd& m) {
  return matrix_entropy_impl(m);
}

double matrix_linear_entropy(const Eigen::MatrixXcd& m) {
  return 2.0 * minor_square_sum(m);
}

double cut_entropy(const Eigen::Ref<const Eigen::VectorXcd>& amplitudes,
                   int rows, int cols) {
  return matrix_entropy_impl(RowMajorMap(amplitudes.data(), rows, cols));
}

double cut_linear_entropy(const Eigen::Ref<const Eigen::VectorXcd>& amplitudes,
                          int rows, int cols) {
  return 2.0 * minor_square_sum(RowMajorMap(amplitudes.data(), rows, cols));
}

}  // namespace detail
}  // namespace aeset
