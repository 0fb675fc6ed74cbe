#pragma once

// Test-side reference computations. They deliberately avoid the library's
// reshape/SVD shortcuts: reduced states come from explicit partial traces.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "aeset/core.hpp"
#include "aeset/separability.hpp"

namespace oracle {

using aeset::Complex;

// rho_m = Tr_{others} |psi><psi| built index by index.
inline Eigen::MatrixXcd reduced_state(const Eigen::VectorXcd& psi,
                                      const std::vector<int>& dims, int m) {
  const int k = static_cast<int>(dims.size());
  int d = 1;
  for (int x : dims) d *= x;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dims[m], dims[m]);
  std::vector<int> a(k), b(k);
  auto digits = [&](int f, std::vector<int>& out) {
    for (int j = k - 1; j >= 0; --j) {
      out[j] = f % dims[j];
      f /= dims[j];
    }
  };
  for (int f = 0; f < d; ++f) {
    digits(f, a);
    for (int g = 0; g < d; ++g) {
      digits(g, b);
      bool same_rest = true;
      for (int j = 0; j < k; ++j) {
        if (j != m && a[j] != b[j]) same_rest = false;
      }
      if (same_rest) rho(a[m], b[m]) += psi(f) * std::conj(psi(g));
    }
  }
  return rho;
}

inline double von_neumann(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
  double h = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double l = eig.eigenvalues()(i);
    if (l > 1e-300) h -= l * std::log2(l);
  }
  return h;
}

inline double entropy(const Eigen::VectorXcd& psi, const std::vector<int>& dims,
                      int m) {
  return von_neumann(reduced_state(psi, dims, m));
}

inline double purity(const Eigen::VectorXcd& psi, const std::vector<int>& dims,
                     int m) {
  const Eigen::MatrixXcd rho = reduced_state(psi, dims, m);
  return (rho * rho).trace().real();
}

inline Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline aeset::PureState bell() {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return aeset::PureState(v);
}

// Kolmogorov-Smirnov statistic of `samples` against the CDF `cdf`.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    worst = std::max({worst, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return worst;
}

}  // namespace oracle
