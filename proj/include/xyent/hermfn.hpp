#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace xyent {

namespace warnings {
/// Counts eigenvalues floored at the underflow limit before fractional
/// powers; nonzero values indicate a nearly singular positive matrix.
inline std::atomic<unsigned long long> underflow_floor_count{0};
}  // namespace warnings

/// log(1 + e^x) without overflow.
inline double softplus(double x) {
  if (x > 36.0) return x + std::exp(-x);
  return std::log1p(std::exp(x));
}

enum class ScalarFn { Exp, Power, Log };

namespace detail {
inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> herm_eig(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian eigendecomposition failed");
  return es;
}
}  // namespace detail

inline Eigen::MatrixXcd herm_exp(const Eigen::MatrixXcd& a) {
  auto es = detail::herm_eig(a);
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

/// A^r for Hermitian strictly positive A. Eigenvalues at or below the
/// underflow floor 1e-300 are clamped there and counted.
inline Eigen::MatrixXcd herm_pow(const Eigen::MatrixXcd& a, double r) {
  auto es = detail::herm_eig(a);
  Eigen::VectorXd lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i) <= 0.0)
      throw std::domain_error("herm_pow: non-positive eigenvalue");
    if (lam(i) < 1e-300) {
      lam(i) = 1e-300;
      ++warnings::underflow_floor_count;
    }
  }
  Eigen::VectorXd p = (r * lam.array().log()).exp();
  return es.eigenvectors() * p.asDiagonal() * es.eigenvectors().adjoint();
}

inline Eigen::MatrixXcd herm_log(const Eigen::MatrixXcd& a) {
  auto es = detail::herm_eig(a);
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) <= 0.0)
      throw std::domain_error("herm_log: non-positive eigenvalue");
  return es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

/// Scalar function of a Hermitian matrix through its eigendecomposition.
inline Eigen::MatrixXcd herm_fn(const Eigen::MatrixXcd& a, ScalarFn fn, double r = 1.0) {
  switch (fn) {
    case ScalarFn::Exp: return herm_exp(a);
    case ScalarFn::Power: return herm_pow(a, r);
    case ScalarFn::Log: return herm_log(a);
  }
  throw std::logic_error("herm_fn: bad tag");
}

}  // namespace xyent
