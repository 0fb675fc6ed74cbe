#include <doctest.h>

#include <cmath>

#include "aeset/constructions.hpp"
#include "aeset/optimizer.hpp"
#include "oracles.hpp"

using namespace aeset;

namespace {

std::vector<double> random_params(int d, CounterRng& rng, double scale) {
  std::vector<double> x(static_cast<std::size_t>(d) * d);
  for (auto& v : x) v = scale * rng.normal_pair().real();
  return x;
}

// Sum over states and subsystems via explicit partial traces.
double reference_total(const StateSet& set, const Partition& p, const Unitary& u) {
  const std::vector<int> dims(p.factors().begin(), p.factors().end());
  double total = 0.0;
  for (const auto& s : set) {
    const Eigen::VectorXcd img = u.matrix() * s.amplitudes();
    for (int m = 0; m < p.size(); ++m) total += oracle::entropy(img, dims, m);
  }
  return total;
}

}  // namespace

TEST_CASE("unitaries from parameters") {
  const std::vector<double> zero(16, 0.0);
  CHECK(unitary_from_params(zero).matrix().isApprox(Eigen::MatrixXcd::Identity(4, 4)));
  CHECK_THROWS_AS(unitary_from_params(std::vector<double>(15, 0.0)), Error);
  CHECK_THROWS_AS(unitary_from_params(std::vector<double>(1, 0.0)), Error);

  CounterRng rng(RunSeed{4, 0});
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 5;
    const auto x = random_params(d, rng, 2.0);
    std::vector<double> neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    const Unitary u = unitary_from_params(x);
    CHECK(unitarity_residual(u.matrix()) < 1e-12);
    const Eigen::MatrixXcd prod = (u * unitary_from_params(neg)).matrix();
    CHECK((prod - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
    // Round trip through the principal logarithm.
    const Unitary back = unitary_from_params(params_from_unitary(u));
    CHECK((back.matrix() - u.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("parameter layout") {
  // A single diagonal entry t gives diag(e^{it}, 1, ...).
  std::vector<double> x(9, 0.0);
  x[1] = 0.3;
  const Unitary u = unitary_from_params(x);
  CHECK(std::abs(u(1, 1) - std::polar(1.0, 0.3)) < 1e-15);
  CHECK(std::abs(u(0, 0) - 1.0) < 1e-15);
  // The first off-diagonal pair is H_01 = re + i im.
  std::vector<double> y(9, 0.0);
  y[3] = 0.2;  // re(H_01)
  const Unitary v = unitary_from_params(y);
  CHECK(std::abs(v(0, 1) - Complex(0.0, std::sin(0.2))) < 1e-15);
}

TEST_CASE("total entropy") {
  const Partition p({2, 2});
  std::vector<PureState> basis;
  for (int i = 0; i < 4; ++i) basis.push_back(PureState::basis(4, i));
  CHECK(total_entropy(StateSet(4, basis), p, Unitary::identity(4)) == 0.0);
  CHECK(total_entropy(StateSet(4, {oracle::bell()}), p, Unitary::identity(4)) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(total_linear_entropy(StateSet(4, {oracle::bell()}), p, Unitary::identity(4)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(total_entropy(StateSet(4, basis), Partition({2, 3}), Unitary::identity(6)), Error);
  CHECK_THROWS_AS(total_entropy(StateSet(4, basis), p, Unitary::identity(6)), Error);

  CounterRng rng(RunSeed{6, 0});
  for (const Partition& q : {Partition({2, 3}), Partition({2, 2, 2}), Partition({3, 3})}) {
    const StateSet set = haar_random_state_set(q.dim(), 3, RunSeed{6, 1});
    const Unitary u = haar_random_unitary(q.dim(), rng);
    CHECK(total_entropy(set, q, u) == doctest::Approx(reference_total(set, q, u)).epsilon(1e-10));
    // Local unitaries after U leave the value unchanged.
    std::vector<Unitary> locals;
    for (int f : q.factors()) locals.push_back(haar_random_unitary(f, rng));
    const Unitary lu = tensor_product(locals) * u;
    CHECK(std::abs(total_entropy(set, q, lu) - total_entropy(set, q, u)) < 1e-10);
  }
}

TEST_CASE("finite-difference gradient is stable under step refinement") {
  const Partition p({2, 2});
  int checked = 0;
  for (std::uint64_t i = 0; checked < 10; ++i) {
    const StateSet set = haar_random_state_set(4, 3, RunSeed{40, i});
    const Unitary u = haar_random_unitary(4, RunSeed{41, i});
    if (total_entropy(set, p, u) < 1e-3) continue;
    ++checked;
    const auto g = total_entropy_gradient(set, p, u, 1e-6);
    const auto fine = total_entropy_gradient(set, p, u, 1e-7);
    double norm = 0.0;
    double diff = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      norm += g[k] * g[k];
      diff += (g[k] - fine[k]) * (g[k] - fine[k]);
    }
    CHECK(std::sqrt(diff) <= 1e-4 * std::sqrt(norm));

    // Independent route: differentiate through unitary_from_params.
    const double h = 1e-5;
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::vector<double> x(g.size(), 0.0);
      x[k] = h;
      const double plus = total_entropy(set, p, unitary_from_params(x) * u);
      x[k] = -h;
      const double minus = total_entropy(set, p, unitary_from_params(x) * u);
      CHECK(g[k] == doctest::Approx((plus - minus) / (2 * h)).epsilon(1e-4).scale(1e-6));
    }
  }
}

TEST_CASE("config validation") {
  OptimizerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.restarts = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.product_threshold = 1e-7;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.gradient_step = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("three Haar states can always be disentangled") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    OptimizerConfig cfg;
    cfg.seed = RunSeed{50, i};
    const OptimizationResult r =
        minimize_total_entropy(haar_random_state_set(4, 3, RunSeed{51, i}), Partition({2, 2}), cfg);
    CHECK(r.min_total_entropy < 1e-11);
    CHECK_FALSE(r.classified_aes);
    CHECK(r.best_params.size() == 16);
    CHECK(unitary_from_params(r.best_params).matrix().isApprox(r.best_unitary.matrix(), 1e-10));
  }
}

TEST_CASE("the d1 + d2 family above its threshold stays entangled") {
  OptimizerConfig cfg;
  cfg.seed = RunSeed{9, 0};
  const OptimizationResult r = minimize_total_entropy(special_set(2, 2, 0.9), Partition({2, 2}), cfg);
  CHECK(r.min_total_entropy > 1e-6);
  CHECK(r.classified_aes);
  CHECK_FALSE(r.entropy_band_warning);
  CHECK(r.restarts_used == cfg.restarts);
  CHECK(total_entropy(special_set(2, 2, 0.9), Partition({2, 2}), r.best_unitary) ==
        doctest::Approx(r.min_total_entropy).epsilon(1e-12));
}

TEST_CASE("results are bitwise reproducible") {
  OptimizerConfig cfg;
  cfg.seed = RunSeed{77, 3};
  const StateSet set = haar_random_state_set(4, 4, RunSeed{78, 0});
  const OptimizationResult a = minimize_total_entropy(set, Partition({2, 2}), cfg);
  const OptimizationResult b = minimize_total_entropy(set, Partition({2, 2}), cfg);
  CHECK(a.min_total_entropy == b.min_total_entropy);
  CHECK(a.best_params == b.best_params);
  CHECK(a.iterations_used == b.iterations_used);
}

TEST_CASE("multipartite minimization") {
  OptimizerConfig cfg;
  cfg.seed = RunSeed{5, 5};
  // Three states at (2,2,2) fit the disentangling bound max d_i + 1 = 3.
  const OptimizationResult r = minimize_total_entropy(
      haar_random_state_set(8, 3, RunSeed{5, 6}), Partition({2, 2, 2}), cfg);
  CHECK(r.min_total_entropy < 1e-11);
}

TEST_CASE("a known linearly dependent set reaches a product configuration") {
  // A product unitary exists, so the global minimum is 0 rather than the
  // 0.13 local minimum.
  using C = Complex;
  const auto state = [](std::vector<C> v) {
    Eigen::VectorXcd x(4);
    for (int i = 0; i < 4; ++i) x(i) = v[static_cast<std::size_t>(i)];
    return PureState::normalized(x);
  };
  const StateSet set(4, {state({1, 0, 0, 0}),
                         state({C(0.2922, -0.0351), C(-0.7764, 0.5573), 0, 0}),
                         state({C(-0.0595, 0.4964), C(0.5150, 0.2846), C(-0.6334, -0.0518), 0}),
                         state({C(0.6996, 0.1303), C(0.0494, 0.0451), C(-0.2643, -0.6475), 0})});
  OptimizerConfig cfg;
  cfg.seed = RunSeed{2024, 0};
  const OptimizationResult r = minimize_total_entropy(set, Partition({2, 2}), cfg);
  CHECK(r.min_total_entropy < 1e-11);
  for (const auto& s : set) {
    CHECK(is_fully_product(r.best_unitary.apply(s), Partition({2, 2})).residual < 1e-5);
  }
}
