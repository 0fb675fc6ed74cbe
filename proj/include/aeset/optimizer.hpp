#pragma once

#include <span>
#include <vector>

#include "aeset/core.hpp"
#include "aeset/separability.hpp"

namespace aeset {

// Totals in [product_threshold, kEntropyBandUpper] are flagged as marginal.
inline constexpr double kEntropyBandUpper = 1e-8;

struct OptimizerConfig {
  int restarts = 5;
  int max_iterations = 500;
  double gradient_step = 1e-6;
  /// A local run stops once one iteration lowers the objective by no more
  /// than convergence_tol times its current value.
  double convergence_tol = 1e-12;
  double product_threshold = 1e-11;
  RunSeed seed{};

  /// Throws InvalidParameter unless every field is positive and
  /// product_threshold < kEntropyBandUpper.
  void validate() const;
};

struct OptimizationResult {
  double min_total_entropy = 0.0;
  std::vector<double> best_params;  // d^2 reals, see unitary_from_params
  Unitary best_unitary = Unitary::identity(2);
  bool classified_aes = false;      // min_total_entropy > product_threshold
  bool entropy_band_warning = false;
  bool converged = false;           // the best restart stopped before max_iterations
  int restarts_used = 0;
  int iterations_used = 0;          // summed over restarts and phases
};

/// U = exp(iH). params[0..d) are the diagonal of H; then for each i < j in
/// row-major order a pair (re, im) gives H_ij = re + i im.
Unitary unitary_from_params(std::span<const double> params);

/// A principal-branch inverse of unitary_from_params (eigenphases in (-pi, pi]).
std::vector<double> params_from_unitary(const Unitary& u);

/// Sum over states of the sum over subsystems of subsystem_entropies(U state).
/// A bipartition therefore counts each cut twice.
double total_entropy(const StateSet& set, const Partition& p, const Unitary& u);

/// Same sum with 1 - Tr rho^2 in place of the von Neumann entropy. Smooth, and
/// zero exactly when total_entropy is.
double total_linear_entropy(const StateSet& set, const Partition& p,
                            const Unitary& u);

/// Central finite-difference gradient of total_entropy in the chart
/// x -> unitary_from_params(x) * U at x = 0, with the given step.
std::vector<double> total_entropy_gradient(const StateSet& set,
                                           const Partition& p, const Unitary& u,
                                           double step);

/// Multi-start BFGS over the unitary group. Each restart starts from a Haar
/// unitary drawn from cfg.seed.child(restart), first drives the linear entropy
/// down and then polishes on the entropy itself. Stops early once a restart
/// gets below product_threshold.
OptimizationResult minimize_total_entropy(const StateSet& set,
                                          const Partition& p,
                                          const OptimizerConfig& cfg = {});

}  // namespace aeset
