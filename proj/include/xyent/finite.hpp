#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "xyent/chain.hpp"
#include "xyent/hermfn.hpp"

namespace xyent {

/// Which generating function of the entropy transport statistics to
/// evaluate at finite volume and finite time.
struct FunctionalKind {
  enum class Type { Pressure, ES, GC };
  Type type = Type::Pressure;
  double p = std::numeric_limits<double>::infinity();  // order, Pressure only
  double s = 0.0;                                      // preparation time, GC only

  static FunctionalKind pressure(double p) {
    if (!(p > 0.0)) throw std::invalid_argument("FunctionalKind: pressure order p must be > 0");
    return {Type::Pressure, p, 0.0};
  }
  static FunctionalKind es() { return {Type::ES, 0.0, 0.0}; }
  static FunctionalKind gc(double s) { return {Type::GC, 0.0, s}; }
};

/// Exact finite-volume evaluator in the one-particle representation.
///
/// All generating functions are computed as differences of
/// sum_i log(1 + lambda_i) over eigenvalues of Hermitian positive matrices;
/// no raw determinant is ever formed. The constructor diagonalizes h and k
/// once; evaluation methods are const and safe to call concurrently.
class FiniteFunctionals {
 public:
  explicit FiniteFunctionals(FiniteChain chain) : c_(std::move(chain)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(c_.h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ek(c_.k);
    if (eh.info() != Eigen::Success || ek.info() != Eigen::Success)
      throw std::runtime_error("FiniteFunctionals: eigendecomposition failed");
    Uh_ = eh.eigenvectors();
    lh_ = eh.eigenvalues();
    Uk_ = ek.eigenvectors();
    lk_ = ek.eigenvalues();
    khat_ = Uh_.transpose() * c_.k * Uh_;
    R_ = Uh_.transpose() * Uk_;
    // density T = (1 + e^{-k})^{-1}
    Eigen::VectorXd tk = (1.0 + (-lk_.array()).exp()).inverse();
    T_ = Uk_ * tk.asDiagonal() * Uk_.transpose();
    log_det_eq_ = lk_.unaryExpr([](double x) { return softplus(x); }).sum();
  }

  const FiniteChain& chain() const { return c_; }

  /// k_t = e^{ith} k e^{-ith}.
  Eigen::MatrixXcd evolve_k(double t) const {
    const int n = c_.dim();
    Eigen::MatrixXcd m(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        m(i, j) = khat_(i, j) * std::polar(1.0, t * (lh_(i) - lh_(j)));
    return Uh_ * m * Uh_.transpose();
  }

  /// Finite-time generating function value.
  double value(const FunctionalKind& kind, double t, double alpha) const {
    guard_overflow(kind, alpha);
    switch (kind.type) {
      case FunctionalKind::Type::Pressure:
        return std::isinf(kind.p) ? pressure_inf(t, alpha) : pressure_p(kind.p, t, alpha);
      case FunctionalKind::Type::ES:
        return es_gc(t, alpha, 0.0);
      case FunctionalKind::Type::GC:
        return es_gc(t, alpha, kind.s);
    }
    throw std::logic_error("FiniteFunctionals::value: bad kind");
  }

  /// Mean entropy production rate over [0, t]: tr(T (k - k_t)) / t.
  double mean_entropy_production(double t) const {
    if (t == 0.0) throw std::invalid_argument("mean_entropy_production: t must be nonzero");
    const Eigen::MatrixXcd kt = evolve_k(t);
    const double trTk = (T_.array() * c_.k.array()).sum();
    const double trTkt = (T_.cast<std::complex<double>>().array() * kt.transpose().array()).sum().real();
    return (trTk - trTkt) / t;
  }

  /// Expected heat flux out of one reservoir at time t.
  double heat_flux(double t, Side side) const {
    const int N = c_.N, M = c_.M;
    const int a = side == Side::Left ? c_.idx(-N - 1) : c_.idx(N + 1);
    const int b = side == Side::Left ? c_.idx(-N) : c_.idx(N);
    const double J = c_.vcoupling(a, b);
    // phi = i [h_side, v_side] = i J (|h_side e_a><e_b| - |e_b><h_side e_a|)
    Eigen::VectorXd col = Eigen::VectorXd::Zero(2 * M + 1);
    if (side == Side::Left) {
      col.head(c_.idx(-N - 1) + 1) = c_.h0.topLeftCorner(c_.idx(-N - 1) + 1, c_.idx(-N - 1) + 1).col(a);
    } else {
      const int r0 = c_.idx(N + 1);
      col.tail(2 * M + 1 - r0) = c_.h0.bottomRightCorner(2 * M + 1 - r0, 2 * M + 1 - r0).col(a - r0);
    }
    const Eigen::VectorXcd u = propagate(col, t);
    const Eigen::VectorXcd w = propagate(Eigen::VectorXd::Unit(2 * M + 1, b), t);
    const std::complex<double> x = w.adjoint() * (T_ * u);
    return -2.0 * J * x.imag();
  }

 private:
  FiniteChain c_;
  Eigen::MatrixXd Uh_, Uk_;
  Eigen::VectorXd lh_, lk_;
  Eigen::MatrixXd khat_;  // Uh^T k Uh
  Eigen::MatrixXd R_;     // Uh^T Uk
  Eigen::MatrixXd T_;
  double log_det_eq_ = 0.0;

  // e^{ith} psi
  Eigen::VectorXcd propagate(const Eigen::VectorXd& psi, double t) const {
    Eigen::VectorXcd y = (Uh_.transpose() * psi).cast<std::complex<double>>();
    for (int i = 0; i < y.size(); ++i) y(i) *= std::polar(1.0, t * lh_(i));
    return Uh_ * y;
  }

  // V_t = e^{-ith} Uk, so that e^{c k_{-t}} = V_t diag(e^{c lk}) V_t^dagger.
  Eigen::MatrixXcd vk(double t) const {
    const int n = c_.dim();
    Eigen::MatrixXcd m(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        m(i, j) = R_(i, j) * std::polar(1.0, -t * lh_(i));
    return Uh_ * m;
  }

  static Eigen::VectorXd positive_spectrum(const Eigen::MatrixXcd& b) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("FiniteFunctionals: eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    for (int i = 0; i < lam.size(); ++i)
      if (lam(i) < 1e-300) {
        lam(i) = 1e-300;
        ++warnings::underflow_floor_count;
      }
    return lam;
  }

  // log det(1 + (e^{(1-a)k/p} e^{2a k_{-t}/p} e^{(1-a)k/p})^{p/2}) - log det(1 + e^k)
  double pressure_p(double p, double t, double alpha) const {
    const Eigen::MatrixXcd V = vk(t);
    const Eigen::MatrixXd P = Uk_ * ((1.0 - alpha) / p * lk_.array()).exp().matrix().asDiagonal() *
                              Uk_.transpose();
    const Eigen::MatrixXcd C = P * V;
    const Eigen::MatrixXcd B =
        C * (2.0 * alpha / p * lk_.array()).exp().matrix().asDiagonal() * C.adjoint();
    const Eigen::VectorXd mu = positive_spectrum(B);
    double acc = 0.0;
    for (int i = 0; i < mu.size(); ++i) acc += softplus(0.5 * p * std::log(mu(i)));
    return acc - log_det_eq_;
  }

  // log det(1 + e^{(1-a)k + a k_{-t}}) - log det(1 + e^k)
  double pressure_inf(double t, double alpha) const {
    const Eigen::MatrixXcd kmt = evolve_k(-t);
    const Eigen::MatrixXcd C = (1.0 - alpha) * c_.k.cast<std::complex<double>>() + alpha * kmt;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(C);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("FiniteFunctionals: eigendecomposition failed");
    double acc = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) acc += softplus(es.eigenvalues()(i));
    return acc - log_det_eq_;
  }

  // log det(1 + e^{k_{-s}/2} e^{alpha (k_t - k)} e^{k_{-s}/2}) - log det(1 + e^k);
  // s = 0 is the Evans-Searles case.
  double es_gc(double t, double alpha, double s) const {
    const Eigen::MatrixXcd A = evolve_k(t) - c_.k;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(A);
    if (ea.info() != Eigen::Success)
      throw std::runtime_error("FiniteFunctionals: eigendecomposition failed");
    const Eigen::MatrixXcd Vs = (s == 0.0) ? Uk_.cast<std::complex<double>>() : vk(s);
    // e^{k_{-s}/2} (alpha A eigenvectors) with the half weights split around
    const Eigen::MatrixXcd Es =
        Vs * (0.5 * lk_.array()).exp().matrix().asDiagonal() * Vs.adjoint();
    const Eigen::MatrixXcd G = Es * ea.eigenvectors() *
                               (0.5 * alpha * ea.eigenvalues().array()).exp().matrix().asDiagonal();
    const Eigen::MatrixXcd B = G * G.adjoint();
    const Eigen::VectorXd mu = positive_spectrum(B);
    double acc = 0.0;
    for (int i = 0; i < mu.size(); ++i) acc += softplus(std::log(mu(i)));
    return acc - log_det_eq_;
  }

  void guard_overflow(const FunctionalKind& kind, double alpha) const {
    const double knorm = std::max(std::abs(lk_(0)), std::abs(lk_(lk_.size() - 1)));
    const double pinv = kind.type == FunctionalKind::Type::Pressure && !std::isinf(kind.p)
                            ? std::max(1.0, 1.0 / kind.p)
                            : 1.0;
    const double budget = knorm * pinv * (std::abs(1.0 - alpha) + 2.0 * std::abs(alpha) + 1.0);
    // documented threshold: exponents entering e^x must stay below ~700
    if (budget > 700.0)
      throw std::overflow_error("entropic functional: exponent budget exceeds overflow threshold");
  }
};

inline double entropic_functional(const FiniteChain& chain, const FunctionalKind& kind, double t,
                                  double alpha) {
  return FiniteFunctionals(chain).value(kind, t, alpha);
}

inline double mean_entropy_production(const FiniteChain& chain, double t) {
  return FiniteFunctionals(chain).mean_entropy_production(t);
}

inline double heat_flux(const FiniteChain& chain, double t, Side side) {
  return FiniteFunctionals(chain).heat_flux(t, side);
}

inline Eigen::MatrixXcd evolve_k(const FiniteChain& chain, double t) {
  return FiniteFunctionals(chain).evolve_k(t);
}

}  // namespace xyent
