#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace xyent {

// Closed-form spectral calculus for 2x2 Hermitian matrices via the
// trace/determinant formulas; no iterative solver at this size.

struct Eig2 {
  double lo = 0.0, hi = 0.0;
  Eigen::Matrix2cd Plo, Phi;  // spectral projections (Phi + Plo = 1)
  bool degenerate = false;
};

inline Eig2 eig_herm2(const Eigen::Matrix2cd& H) {
  Eig2 e;
  const double a = H(0, 0).real();
  const double b = H(1, 1).real();
  const double mean = 0.5 * (a + b);
  const double r = std::hypot(0.5 * (a - b), std::abs(H(0, 1)));
  e.lo = mean - r;
  e.hi = mean + r;
  const double scale = std::abs(a) + std::abs(b) + std::abs(H(0, 1)) + 1.0;
  if (r <= 1e-15 * scale) {
    e.degenerate = true;
    e.Plo = 0.5 * Eigen::Matrix2cd::Identity();
    e.Phi = 0.5 * Eigen::Matrix2cd::Identity();
    return e;
  }
  const Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
  e.Phi = (H - e.lo * I) / (e.hi - e.lo);
  e.Plo = (e.hi * I - H) / (e.hi - e.lo);
  return e;
}

template <typename F>
Eigen::Matrix2cd herm2_apply(const Eigen::Matrix2cd& H, F&& f) {
  const Eig2 e = eig_herm2(H);
  if (e.degenerate) return f(0.5 * (e.lo + e.hi)) * Eigen::Matrix2cd::Identity();
  return f(e.lo) * e.Plo + f(e.hi) * e.Phi;
}

inline Eigen::Matrix2cd exp_herm2(const Eigen::Matrix2cd& H) {
  return herm2_apply(H, [](double x) { return std::exp(x); });
}

/// H^r for Hermitian positive definite H.
inline Eigen::Matrix2cd pow_herm2(const Eigen::Matrix2cd& H, double r) {
  return herm2_apply(H, [r](double x) { return std::pow(std::max(x, 1e-300), r); });
}

/// log det(1 + H) for Hermitian positive semidefinite H, overflow safe.
inline double log_det_1p_herm2(const Eigen::Matrix2cd& H) {
  const Eig2 e = eig_herm2(H);
  auto log1p_pos = [](double lam) {
    if (lam < 1e-300) lam = 1e-300;
    const double x = std::log(lam);
    if (x > 36.0) return x + std::exp(-x);
    return std::log1p(lam);
  };
  return log1p_pos(e.lo) + log1p_pos(e.hi);
}

}  // namespace xyent
