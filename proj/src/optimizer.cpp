#include "aeset/optimizer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace aeset {
namespace {

enum class Measure { Entropy, Linear };

// Below these values a run has nothing left to gain.
constexpr double kLinearFloor = 1e-28;
constexpr double kEntropyFloor = 0.0;
// Caps the length of a single step in the chart.
constexpr double kMaxStep = 1.0;
constexpr double kArmijo = 1e-4;
constexpr double kMinStepFraction = 1e-12;
constexpr int kReorthonormalizeEvery = 25;

void require_compatible(const StateSet& set, const Partition& p) {
  if (set.dim() != p.dim()) {
    throw Error(ErrorKind::InvalidDimension,
                "states live in C^" + std::to_string(set.dim()) +
                    " but the partition is " + p.str());
  }
}

double evaluate(const Eigen::MatrixXcd& images, const Partition& p,
                Measure measure) {
  double total = 0.0;
  const bool bipartite = p.size() == 2;
  for (Eigen::Index i = 0; i < images.cols(); ++i) {
    const auto col = images.col(i);
    if (bipartite) {
      const int d1 = p.factor(0);
      const int d2 = p.factor(1);
      total += 2.0 * (measure == Measure::Entropy
                          ? detail::cut_entropy(col, d1, d2)
                          : detail::cut_linear_entropy(col, d1, d2));
      continue;
    }
    for (int m = 0; m < p.size(); ++m) {
      const Eigen::MatrixXcd sub = detail::subsystem_matrix(col, p, m);
      total += measure == Measure::Entropy ? detail::matrix_entropy(sub)
                                           : detail::matrix_linear_entropy(sub);
    }
  }
  return total;
}

Eigen::MatrixXcd hermitian_from_params(const Eigen::Ref<const Eigen::VectorXd>& x,
                                       int d) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
  Eigen::Index k = 0;
  for (int i = 0; i < d; ++i) h(i, i) = x(k++);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const Complex v(x(k), x(k + 1));
      k += 2;
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

Eigen::MatrixXcd expi(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  Eigen::VectorXcd phases(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    phases(i) = std::polar(1.0, lambda(i));
  }
  const Eigen::MatrixXcd& v = eig.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

// One step of the Newton-Schulz polar iteration pulls a nearly unitary matrix
// back onto the group without moving it noticeably.
void reorthonormalize(Eigen::MatrixXcd& u) {
  const Eigen::Index d = u.rows();
  const Eigen::MatrixXcd gram = u.adjoint() * u;
  u = u * (1.5 * Eigen::MatrixXcd::Identity(d, d) - 0.5 * gram);
}

// Objective and finite-difference gradient in the chart U(x) = exp(iH(x)) U_c,
// always evaluated at x = 0. Each coordinate direction touches one or two rows
// of the images, so the probes skip the full matrix exponential.
class Problem {
 public:
  Problem(const StateSet& set, const Partition& p, Measure measure, double step)
      : states_(set.as_columns()), p_(p), measure_(measure), step_(step),
        d_(set.dim()) {}

  int dim() const { return d_; }
  int param_count() const { return d_ * d_; }
  const Eigen::MatrixXcd& states() const { return states_; }
  double floor() const {
    return measure_ == Measure::Linear ? kLinearFloor : kEntropyFloor;
  }

  double value(const Eigen::MatrixXcd& images) const {
    return evaluate(images, p_, measure_);
  }

  Eigen::VectorXd gradient(const Eigen::MatrixXcd& images) const {
    Eigen::VectorXd g(param_count());
    Eigen::MatrixXcd probe = images;
    Eigen::Index k = 0;
    for (int i = 0; i < d_; ++i) {
      const Eigen::VectorXcd row = images.row(i);
      probe.row(i) = std::polar(1.0, step_) * row;
      const double plus = value(probe);
      probe.row(i) = std::polar(1.0, -step_) * row;
      const double minus = value(probe);
      probe.row(i) = row;
      g(k++) = (plus - minus) / (2.0 * step_);
    }
    const double c = std::cos(step_);
    const double s = std::sin(step_);
    const Complex is(0.0, s);
    for (int i = 0; i < d_; ++i) {
      for (int j = i + 1; j < d_; ++j) {
        const Eigen::VectorXcd ri = images.row(i);
        const Eigen::VectorXcd rj = images.row(j);
        // Real part: exp(i t (E_ij + E_ji)) = [[cos, i sin], [i sin, cos]].
        probe.row(i) = c * ri + is * rj;
        probe.row(j) = is * ri + c * rj;
        double plus = value(probe);
        probe.row(i) = c * ri - is * rj;
        probe.row(j) = -is * ri + c * rj;
        double minus = value(probe);
        g(k++) = (plus - minus) / (2.0 * step_);
        // Imaginary part: exp(i t (i E_ij - i E_ji)) = [[cos, -sin], [sin, cos]].
        probe.row(i) = c * ri - s * rj;
        probe.row(j) = s * ri + c * rj;
        plus = value(probe);
        probe.row(i) = c * ri + s * rj;
        probe.row(j) = -s * ri + c * rj;
        minus = value(probe);
        g(k++) = (plus - minus) / (2.0 * step_);
        probe.row(i) = ri;
        probe.row(j) = rj;
      }
    }
    return g;
  }

 private:
  Eigen::MatrixXcd states_;
  const Partition& p_;
  Measure measure_;
  double step_;
  int d_;
};

struct LocalRun {
  Eigen::MatrixXcd u;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

LocalRun bfgs(const Problem& problem, Eigen::MatrixXcd u,
              const OptimizerConfig& cfg) {
  const int n = problem.param_count();
  const int d = problem.dim();
  LocalRun run;
  Eigen::MatrixXcd images = u * problem.states();
  double f = problem.value(images);
  Eigen::VectorXd g = problem.gradient(images);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool fresh = true;

  while (run.iterations < cfg.max_iterations) {
    if (f <= problem.floor()) {
      run.converged = true;
      break;
    }
    Eigen::VectorXd dir = -hinv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      fresh = true;
      dir = -g;
      slope = -g.squaredNorm();
    }
    if (!(slope < 0.0)) {
      run.converged = true;
      break;
    }
    const double norm = dir.norm();
    const double t0 = norm > kMaxStep ? kMaxStep / norm : 1.0;
    double t = t0;
    bool accepted = false;
    Eigen::MatrixXcd cand_u;
    Eigen::MatrixXcd cand_images;
    double cand_f = 0.0;
    while (t >= kMinStepFraction * t0) {
      cand_u = expi(hermitian_from_params(t * dir, d)) * u;
      cand_images = cand_u * problem.states();
      cand_f = problem.value(cand_images);
      if (cand_f <= f + kArmijo * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // A failure right after a reset means the descent direction is useless
      // here (a minimum or a kink of the objective); the run ends.
      if (fresh) {
        run.converged = true;
        break;
      }
      hinv.setIdentity();
      fresh = true;
      continue;
    }
    ++run.iterations;
    const Eigen::VectorXd s = t * dir;
    const double decrease = f - cand_f;
    u = std::move(cand_u);
    if (run.iterations % kReorthonormalizeEvery == 0) {
      reorthonormalize(u);
      cand_images = u * problem.states();
      cand_f = problem.value(cand_images);
    }
    images = std::move(cand_images);
    f = cand_f;
    const Eigen::VectorXd g_new = problem.gradient(images);
    const Eigen::VectorXd y = g_new - g;
    g = g_new;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      if (fresh) {
        hinv *= sy / y.squaredNorm();
        fresh = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = hinv * y;
      const double yhy = y.dot(hy);
      hinv += ((1.0 + rho * yhy) * rho) * (s * s.transpose()) -
              rho * (hy * s.transpose() + s * hy.transpose());
    }
    if (decrease <= cfg.convergence_tol * f) {
      run.converged = true;
      break;
    }
  }
  reorthonormalize(u);
  run.value = problem.value(u * problem.states());
  run.u = std::move(u);
  return run;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (restarts < 1) {
    throw Error(ErrorKind::InvalidParameter, "restarts must be >= 1");
  }
  if (max_iterations < 1) {
    throw Error(ErrorKind::InvalidParameter, "max_iterations must be >= 1");
  }
  if (!(gradient_step > 0.0) || !(convergence_tol > 0.0) ||
      !(product_threshold > 0.0)) {
    throw Error(ErrorKind::InvalidParameter,
                "gradient_step, convergence_tol and product_threshold must be "
                "positive");
  }
  if (!(product_threshold < kEntropyBandUpper)) {
    throw Error(ErrorKind::InvalidParameter,
                "product_threshold must lie below 1e-8");
  }
}

Unitary unitary_from_params(std::span<const double> params) {
  const auto n = static_cast<long long>(params.size());
  const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d < 2 || static_cast<long long>(d) * d != n) {
    throw Error(ErrorKind::InvalidParameter,
                "expected d^2 parameters with d >= 2, got " + std::to_string(n));
  }
  const Eigen::Map<const Eigen::VectorXd> x(params.data(), n);
  return Unitary(expi(hermitian_from_params(x, d)));
}

std::vector<double> params_from_unitary(const Unitary& u) {
  const int d = u.dim();
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u.matrix());
  const Eigen::MatrixXcd& q = schur.matrixU();
  const Eigen::MatrixXcd& t = schur.matrixT();
  Eigen::VectorXcd angles(d);
  for (int i = 0; i < d; ++i) angles(i) = std::arg(t(i, i));
  const Eigen::MatrixXcd h = q * angles.asDiagonal() * q.adjoint();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i) out.push_back(h(i, i).real());
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      out.push_back(h(i, j).real());
      out.push_back(h(i, j).imag());
    }
  }
  return out;
}

double total_entropy(const StateSet& set, const Partition& p, const Unitary& u) {
  require_compatible(set, p);
  if (u.dim() != set.dim()) {
    throw Error(ErrorKind::InvalidDimension, "unitary dimension mismatch");
  }
  return evaluate(u.matrix() * set.as_columns(), p, Measure::Entropy);
}

double total_linear_entropy(const StateSet& set, const Partition& p,
                            const Unitary& u) {
  require_compatible(set, p);
  if (u.dim() != set.dim()) {
    throw Error(ErrorKind::InvalidDimension, "unitary dimension mismatch");
  }
  return evaluate(u.matrix() * set.as_columns(), p, Measure::Linear);
}

std::vector<double> total_entropy_gradient(const StateSet& set,
                                           const Partition& p, const Unitary& u,
                                           double step) {
  require_compatible(set, p);
  if (u.dim() != set.dim()) {
    throw Error(ErrorKind::InvalidDimension, "unitary dimension mismatch");
  }
  if (!(step > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "step must be positive");
  }
  const Problem problem(set, p, Measure::Entropy, step);
  const Eigen::VectorXd g = problem.gradient(u.matrix() * problem.states());
  return {g.data(), g.data() + g.size()};
}

OptimizationResult minimize_total_entropy(const StateSet& set,
                                          const Partition& p,
                                          const OptimizerConfig& cfg) {
  require_compatible(set, p);
  cfg.validate();
  const Problem linear(set, p, Measure::Linear, cfg.gradient_step);
  const Problem entropy(set, p, Measure::Entropy, cfg.gradient_step);

  OptimizationResult result;
  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXcd best_u;
  for (int r = 0; r < cfg.restarts; ++r) {
    const Unitary start =
        haar_random_unitary(set.dim(), cfg.seed.child(static_cast<std::uint64_t>(r)));
    LocalRun run = bfgs(linear, start.matrix(), cfg);
    result.iterations_used += run.iterations;
    double value = entropy.value(run.u * entropy.states());
    if (!(value < cfg.product_threshold)) {
      LocalRun polish = bfgs(entropy, run.u, cfg);
      result.iterations_used += polish.iterations;
      if (polish.value < value) {
        value = polish.value;
        run.u = std::move(polish.u);
      }
      run.converged = polish.converged;
    }
    result.restarts_used = r + 1;
    if (value < best) {
      best = value;
      best_u = std::move(run.u);
      result.converged = run.converged;
    }
    if (best < cfg.product_threshold) break;
  }

  result.min_total_entropy = std::max(best, 0.0);
  result.best_unitary = Unitary(best_u);
  result.best_params = params_from_unitary(result.best_unitary);
  result.classified_aes = result.min_total_entropy > cfg.product_threshold;
  result.entropy_band_warning =
      result.min_total_entropy >= cfg.product_threshold &&
      result.min_total_entropy <= kEntropyBandUpper;
  return result;
}

}  // namespace aeset
