#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "xyent/chain.hpp"
#include "xyent/finite.hpp"

namespace xyent {

/// Brute-force many-body representation of the open chain on 2M+1 spins,
/// used as ground truth for the one-particle module. Dimension is 2^(2M+1),
/// so M <= 5 is enforced.
struct SpinSystem {
  int M = 0;
  int N = 0;
  double beta_l = 0.0;
  double beta_r = 0.0;
  Eigen::MatrixXd H, Hl, Hc, Hr, Vl, Vr;  // all real symmetric
  Eigen::MatrixXd omega;                   // initial density matrix
  Eigen::MatrixXd logomega;
  // spectral data shared by the measurement-protocol routines:
  Eigen::MatrixXd Us;      // common eigenbasis of omega and S = -log omega
  Eigen::VectorXd w;       // eigenvalues of omega (probabilities)
  Eigen::VectorXd logw;    // log w, computed without forming log(omega)
  Eigen::MatrixXd Uh;      // eigenbasis of H
  Eigen::VectorXd lam;     // eigenvalues of H

  int dim() const { return H.rows(); }
};

/// Discrete law of the mean entropy-change rate from the two-time
/// measurement protocol; atoms (phi_j, p_j) sorted by phi.
struct FcsMeasure {
  std::vector<std::pair<double, double>> atoms;
  bool degenerate_grouping = false;  // two S-groups closer than 10x tolerance
};

namespace detail {

// kron(I_{2^left}, B, I_{2^right}) for a dense real block B.
inline Eigen::MatrixXd embed(int left, const Eigen::MatrixXd& B, int right) {
  const long dl = 1L << left, dr = 1L << right, db = B.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dl * db * dr, dl * db * dr);
  for (long a = 0; a < dl; ++a)
    for (long i = 0; i < db; ++i)
      for (long j = 0; j < db; ++j) {
        if (B(i, j) == 0.0) continue;
        for (long b = 0; b < dr; ++b)
          out((a * db + i) * dr + b, (a * db + j) * dr + b) = B(i, j);
      }
  return out;
}

// sigma^(1) sigma^(1) + sigma^(2) sigma^(2) on two adjacent sites (real).
inline Eigen::MatrixXd xx_plus_yy() {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(1, 2) = m(2, 1) = 2.0;
  return m;
}

inline Eigen::MatrixXd sigma_z() {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

}  // namespace detail

/// Assemble the many-body operators for the truncation [-M, M]. Site x is
/// tensor factor x + M (leftmost site first).
inline SpinSystem build_spin_system(const ChainSpec& spec, int M) {
  const int N = spec.center_halfwidth;
  if (2 * M + 1 > 11) throw std::invalid_argument("build_spin_system: 2M+1 must be <= 11");
  if (M < N + 1) throw std::invalid_argument("build_spin_system: truncation M too small");

  const int n = 2 * M + 1;
  const long dim = 1L << n;
  SpinSystem s;
  s.M = M;
  s.N = N;
  s.beta_l = spec.beta_l;
  s.beta_r = spec.beta_r;

  auto bond = [&](int x) -> Eigen::MatrixXd {  // (1/2) J_x (xx + yy) at sites x, x+1
    return 0.5 * spec.coupling(x) * detail::embed(x + M, detail::xx_plus_yy(), n - (x + M) - 2);
  };
  auto field = [&](int x) -> Eigen::MatrixXd {  // (1/2) v_x sigma^(3) at site x
    return 0.5 * spec.field(x) * detail::embed(x + M, detail::sigma_z(), n - (x + M) - 1);
  };
  auto block = [&](int lo, int hi) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int x = lo; x < hi; ++x) h += bond(x);
    for (int x = lo; x <= hi; ++x) h += field(x);
    return h;
  };

  s.Hl = block(-M, -N - 1);
  s.Hc = block(-N, N);
  s.Hr = block(N + 1, M);
  s.Vl = bond(-N - 1);
  s.Vr = bond(N);
  s.H = s.Hl + s.Hc + s.Hr + s.Vl + s.Vr;

  const Eigen::MatrixXd Hb = -spec.beta_l * s.Hl - spec.beta_r * s.Hr;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(Hb);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(s.H);
  if (eb.info() != Eigen::Success || eh.info() != Eigen::Success)
    throw std::runtime_error("build_spin_system: eigendecomposition failed");
  s.Us = eb.eigenvectors();
  s.Uh = eh.eigenvectors();
  s.lam = eh.eigenvalues();

  const Eigen::VectorXd eps = eb.eigenvalues();
  const double emax = eps.maxCoeff();
  const double lse = emax + std::log((eps.array() - emax).exp().sum());  // log Z
  s.logw = eps.array() - lse;
  s.w = s.logw.array().exp();
  s.omega = s.Us * s.w.asDiagonal() * s.Us.transpose();
  s.logomega = Hb - lse * Eigen::MatrixXd::Identity(dim, dim);
  return s;
}

namespace detail {

// |<u_j, e^{-itH} u_i>|^2 in the omega eigenbasis.
inline Eigen::MatrixXd transition_probabilities(const SpinSystem& s, double t) {
  const Eigen::MatrixXd C = s.Uh.transpose() * s.Us;
  Eigen::MatrixXcd ph(C.rows(), C.cols());
  for (int j = 0; j < C.cols(); ++j)
    for (int i = 0; i < C.rows(); ++i)
      ph(i, j) = C(i, j) * std::polar(1.0, -t * s.lam(i));
  const Eigen::MatrixXcd Y = C.transpose() * ph;  // Y_{ji} = <u_j, e^{-itH} u_i>
  return Y.cwiseAbs2();
}

struct Grouping {
  std::vector<double> values;      // group representatives
  std::vector<int> group_of;       // index -> group
  bool close_groups = false;
};

inline Grouping group_values(const Eigen::VectorXd& vals, double tol) {
  std::vector<int> order(vals.size());
  for (int i = 0; i < vals.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return vals(a) < vals(b); });
  Grouping g;
  g.group_of.resize(vals.size());
  double prev = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const double v = vals(order[r]);
    if (r == 0 || v - prev > tol) {
      if (r > 0 && v - g.values.back() < 10.0 * tol) g.close_groups = true;
      g.values.push_back(v);
    }
    g.group_of[order[r]] = static_cast<int>(g.values.size()) - 1;
    prev = v;
  }
  return g;
}

}  // namespace detail

/// Two-time measurement statistics of the entropy observable S = -log omega.
/// Spectral projections of S group eigenvalues within 1e-9.
inline FcsMeasure fcs_measure(const SpinSystem& s, double t) {
  if (t == 0.0) throw std::invalid_argument("fcs_measure: t must be nonzero");
  constexpr double kGroupTol = 1e-9;
  const Eigen::VectorXd svals = -s.logw;
  const auto groups = detail::group_values(svals, kGroupTol);
  const Eigen::MatrixXd P = detail::transition_probabilities(s, t);

  const int ng = static_cast<int>(groups.values.size());
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(ng, ng);  // (initial s, final s')
  for (int i = 0; i < svals.size(); ++i)
    for (int j = 0; j < svals.size(); ++j)
      joint(groups.group_of[i], groups.group_of[j]) += s.w(i) * P(j, i);

  // collect by phi = (s' - s)/t, grouping differences at the same tolerance
  std::map<long long, std::pair<double, double>> acc;  // key: rounded diff
  for (int a = 0; a < ng; ++a)
    for (int b = 0; b < ng; ++b) {
      const double diff = groups.values[b] - groups.values[a];
      const long long key = static_cast<long long>(std::llround(diff / kGroupTol));
      auto& slot = acc[key];
      slot.first = diff;
      slot.second += joint(a, b);
    }
  FcsMeasure m;
  m.degenerate_grouping = groups.close_groups;
  m.atoms.reserve(acc.size());
  for (const auto& [_, dv] : acc) m.atoms.emplace_back(dv.first / t, dv.second);
  std::sort(m.atoms.begin(), m.atoms.end());
  return m;
}

/// log of the moment generating function sum_j p_j e^{-alpha t phi_j}.
inline double fcs_mgf(const FcsMeasure& m, double t, double alpha) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> expo;
  expo.reserve(m.atoms.size());
  for (const auto& [phi, p] : m.atoms) {
    if (p <= 0.0) continue;
    const double e = -alpha * t * phi + std::log(p);
    expo.push_back(e);
    best = std::max(best, e);
  }
  double acc = 0.0;
  for (double e : expo) acc += std::exp(e - best);
  return best + std::log(acc);
}

/// Independent route to the same generating function: log tr(omega_t^{1-alpha} omega^alpha).
inline double fcs_mgf_direct(const SpinSystem& s, double t, double alpha) {
  const Eigen::MatrixXd P = detail::transition_probabilities(s, t);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> expo;
  expo.reserve(static_cast<std::size_t>(P.size()));
  for (int i = 0; i < s.w.size(); ++i)
    for (int j = 0; j < s.w.size(); ++j) {
      if (P(j, i) <= 0.0) continue;
      const double e = (1.0 - alpha) * s.logw(i) + alpha * s.logw(j) + std::log(P(j, i));
      expo.push_back(e);
      best = std::max(best, e);
    }
  double acc = 0.0;
  for (double e : expo) acc += std::exp(e - best);
  return best + std::log(acc);
}

/// log omega(e^{-alpha t Sigma^t}) with t Sigma^t = log omega - e^{itH} log omega e^{-itH}.
inline double es_oracle(const SpinSystem& s, double t, double alpha) {
  const int n = s.dim();
  Eigen::MatrixXcd U(n, n);
  {
    Eigen::MatrixXcd ph(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) ph(i, j) = s.Uh(i, j) * std::polar(1.0, t * s.lam(j));
    U = ph * s.Uh.transpose().cast<std::complex<double>>();  // e^{itH}
  }
  const Eigen::MatrixXcd A =
      s.logomega.cast<std::complex<double>>() - U * s.logomega.cast<std::complex<double>>() * U.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(-alpha * A);
  const Eigen::MatrixXcd expA = ea.eigenvectors() *
                                ea.eigenvalues().array().exp().matrix().asDiagonal() *
                                ea.eigenvectors().adjoint();
  const std::complex<double> tr = (s.omega.cast<std::complex<double>>().array() *
                                   expA.transpose().array()).sum();
  return std::log(tr.real());
}

/// S(omega_t | omega) = tr(omega_t (log omega - log omega_t)) <= 0.
inline double relative_entropy(const SpinSystem& s, double t) {
  const Eigen::MatrixXd P = detail::transition_probabilities(s, t);
  double tr_omegat_logomega = 0.0;
  for (int i = 0; i < s.w.size(); ++i)
    for (int j = 0; j < s.w.size(); ++j) tr_omegat_logomega += s.w(i) * P(j, i) * s.logw(j);
  const double tr_omega_logomega = (s.w.array() * s.logw.array()).sum();
  return tr_omegat_logomega - tr_omega_logomega;
}

struct JwReport {
  double max_deviation = 0.0;
  long worst_index = -1;
  bool ok = false;
};

/// Compare the many-body spectrum of H with the subset sums of the
/// one-particle spectrum, both shifted to start at zero. Agreement pins the
/// free-fermion representation including its additive constant convention.
inline JwReport jw_spectrum_check(const SpinSystem& s, const FiniteChain& chain,
                                  double tol = 1e-8) {
  if (chain.dim() != 2 * s.M + 1)
    throw std::invalid_argument("jw_spectrum_check: truncations differ");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(chain.h);
  const Eigen::VectorXd eps = eh.eigenvalues();

  std::vector<double> sums{0.0};
  sums.reserve(1L << eps.size());
  for (int i = 0; i < eps.size(); ++i) {
    const std::size_t m = sums.size();
    for (std::size_t j = 0; j < m; ++j) sums.push_back(sums[j] + eps(i));
  }
  std::sort(sums.begin(), sums.end());

  Eigen::VectorXd spin = s.lam;
  std::sort(spin.data(), spin.data() + spin.size());

  JwReport rep;
  const double s0 = spin(0), f0 = sums.front();
  for (long i = 0; i < spin.size(); ++i) {
    const double d = std::abs((spin(i) - s0) - (sums[i] - f0));
    if (d > rep.max_deviation) {
      rep.max_deviation = d;
      rep.worst_index = i;
    }
  }
  rep.ok = rep.max_deviation <= tol;
  return rep;
}

}  // namespace xyent
