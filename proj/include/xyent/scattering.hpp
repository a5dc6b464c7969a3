#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "xyent/chain.hpp"

namespace xyent {

using complexd = std::complex<double>;

/// Common transport band: intersection of the two tail bands
/// [v - 2|J|, v + 2|J|]. May be empty.
struct AcBand {
  double left_lo = 0.0, left_hi = 0.0;
  double right_lo = 0.0, right_hi = 0.0;
  double lo = 0.0, hi = 1.0;  // intersection; empty iff lo >= hi

  bool empty() const { return !(lo < hi); }
  double width() const { return empty() ? 0.0 : hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  double halfwidth() const { return 0.5 * width(); }

  /// Distance of E to the nearest edge of either tail band.
  double edge_distance(double E) const {
    double d = std::abs(E - left_lo);
    d = std::min(d, std::abs(E - left_hi));
    d = std::min(d, std::abs(E - right_lo));
    d = std::min(d, std::abs(E - right_hi));
    return d;
  }
};

inline AcBand ac_band(const ChainSpec& spec) {
  AcBand b;
  b.left_lo = spec.left_tail.v - 2.0 * std::abs(spec.left_tail.J);
  b.left_hi = spec.left_tail.v + 2.0 * std::abs(spec.left_tail.J);
  b.right_lo = spec.right_tail.v - 2.0 * std::abs(spec.right_tail.J);
  b.right_hi = spec.right_tail.v + 2.0 * std::abs(spec.right_tail.J);
  b.lo = std::max(b.left_lo, b.right_lo);
  b.hi = std::min(b.left_hi, b.right_hi);
  if (b.empty()) {
    b.lo = 0.0;
    b.hi = 0.0;
  }
  return b;
}

/// Boundary Green's function m(z) = <delta_edge, (h_half - z)^{-1} delta_edge>
/// of the half-line Jacobi matrix with constant coupling J and field v.
/// Herglotz: Im m > 0 for Im z > 0; on the band Im m(E+i0) = sqrt(4J^2-(E-v)^2)/(2J^2).
/// Real z is interpreted as the boundary value from above.
inline complexd tail_m(double J, double v, complexd z) {
  const double J2 = J * J;
  if (z.imag() == 0.0) {
    const double x = z.real() - v;
    const double disc = x * x - 4.0 * J2;
    if (disc < 0.0) return complexd(-x, std::sqrt(-disc)) / (2.0 * J2);
    // outside the band: real decaying branch, |2 J^2 m| < |x|
    const double root = std::sqrt(disc);
    return complexd((x > 0.0 ? -x + root : -x - root) / (2.0 * J2), 0.0);
  }
  const complexd x = z - v;
  const complexd root = std::sqrt(x * x - 4.0 * J2);
  const complexd m1 = (-x + root) / (2.0 * J2);
  const complexd m2 = (-x - root) / (2.0 * J2);
  return m1.imag() > 0.0 ? m1 : m2;
}

/// Boundary value of the decoupled half-line resolvent at its edge site,
/// threading window modifications onto the constant tail by the continued
/// fraction m -> 1/(v_x - z - J^2 m).
///   Side::Left : half-line (-inf, at_site], edge delta_{at_site}
///   Side::Right: half-line [at_site, +inf), edge delta_{at_site}
inline complexd half_line_m(const ChainSpec& spec, Side side, int at_site, complexd z) {
  if (side == Side::Left) {
    int start = std::min(at_site, spec.modification_min()) - 1;
    complexd m = tail_m(spec.left_tail.J, spec.left_tail.v, z);
    for (int x = start + 1; x <= at_site; ++x) {
      const double Jprev = spec.coupling(x - 1);
      m = 1.0 / (spec.field(x) - z - Jprev * Jprev * m);
    }
    return m;
  }
  int start = std::max(at_site, spec.modification_max()) + 1;
  complexd m = tail_m(spec.right_tail.J, spec.right_tail.v, z);
  for (int x = start - 1; x >= at_site; --x) {
    const double Jx = spec.coupling(x);
    m = 1.0 / (spec.field(x) - z - Jx * Jx * m);
  }
  return m;
}

/// Resolvent entries of the full-line operator at E + i0, exact for
/// eventually-constant chains: the two semi-infinite tails enter as complex
/// self-energies J^2 m(E+i0) on the edge diagonal of a finite enclosure.
class GreenSolver {
 public:
  GreenSolver(const ChainSpec& spec, double E)
      : lo_(std::min({-spec.center_halfwidth - 1, spec.modification_min(), 0}) - 2),
        hi_(std::max({spec.center_halfwidth + 1, spec.modification_max(), 0}) + 2) {
    const int n = hi_ - lo_ + 1;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    for (int x = lo_; x <= hi_; ++x) A(x - lo_, x - lo_) = spec.field(x) - E;
    for (int x = lo_; x < hi_; ++x) {
      const double J = spec.coupling(x);
      A(x - lo_, x - lo_ + 1) = J;
      A(x - lo_ + 1, x - lo_) = J;
    }
    const double Jl = spec.coupling(lo_ - 1);
    const double Jr = spec.coupling(hi_);
    A(0, 0) -= Jl * Jl * tail_m(spec.left_tail.J, spec.left_tail.v, E);
    A(n - 1, n - 1) -= Jr * Jr * tail_m(spec.right_tail.J, spec.right_tail.v, E);
    lu_.compute(A);
    if (!lu_.isInvertible())
      throw std::runtime_error("full_green: singular effective matrix (non-a.c. point)");
    G_ = lu_.inverse();
  }

  int lo() const { return lo_; }
  int hi() const { return hi_; }

  complexd entry(int a, int b) const {
    if (a < lo_ || a > hi_ || b < lo_ || b > hi_)
      throw std::invalid_argument("full_green: site outside enclosure");
    return G_(a - lo_, b - lo_);
  }

 private:
  int lo_, hi_;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu_;
  Eigen::MatrixXcd G_;
};

inline complexd full_green(const ChainSpec& spec, double E, int a, int b) {
  return GreenSolver(spec, E).entry(a, b);
}

/// 2x2 scattering matrix at energy E with its unitarity certificate.
struct SMatrix {
  double E = 0.0;
  Eigen::Matrix2cd s;
  double unitarity_residual = 0.0;  // ||s s^dag - 1||_max
  double symmetry_residual = 0.0;   // |s_lr - s_rl|
};

inline SMatrix scattering_matrix(const ChainSpec& spec, double E) {
  const AcBand band = ac_band(spec);
  if (band.empty()) throw std::runtime_error("scattering_matrix: empty common band");
  if (!(E > band.lo && E < band.hi))
    throw std::runtime_error("scattering_matrix: E outside the common band");
  if (band.edge_distance(E) <= 1e-9)
    throw std::runtime_error("scattering_matrix: E too close to a band edge");

  const int N = spec.center_halfwidth;
  const double Jl = spec.coupling(-N - 1);
  const double Jr = spec.coupling(N);
  const double Fl = half_line_m(spec, Side::Left, -N - 1, E).imag();
  const double Fr = half_line_m(spec, Side::Right, N + 1, E).imag();

  GreenSolver g(spec, E);
  const complexd Hll = g.entry(-N, -N);
  const complexd Hlr = g.entry(-N, N);
  const complexd Hrl = g.entry(N, -N);
  const complexd Hrr = g.entry(N, N);

  const complexd i2(0.0, 2.0);
  SMatrix out;
  out.E = E;
  out.s(0, 0) = 1.0 + i2 * Jl * Jl * Hll * Fl;
  out.s(0, 1) = i2 * Jl * Jr * Hlr * std::sqrt(Fl * Fr);
  out.s(1, 0) = i2 * Jr * Jl * Hrl * std::sqrt(Fr * Fl);
  out.s(1, 1) = 1.0 + i2 * Jr * Jr * Hrr * Fr;

  const Eigen::Matrix2cd r = out.s * out.s.adjoint() - Eigen::Matrix2cd::Identity();
  out.unitarity_residual = r.cwiseAbs().maxCoeff();
  out.symmetry_residual = std::abs(out.s(0, 1) - out.s(1, 0));
  return out;
}

struct ReflectionReport {
  bool is_reflectionless = false;
  double max_diag = 0.0;       // max over grid of max(|s_ll|, |s_rr|)
  double max_m_residual = 0.0; // max over grid of |J_N^2 m_N^+ conj(m_{N+1}^-) - 1|
};

/// Off-diagonality of s(E) on a grid, together with the equivalent
/// m-function criterion J_N^2 m_N^+(E+i0) conj(m_{N+1}^-(E+i0)) = 1.
inline ReflectionReport reflectionless_test(const ChainSpec& spec, const std::vector<double>& grid,
                                            double tol = 1e-8) {
  const AcBand band = ac_band(spec);
  if (band.empty()) throw std::runtime_error("reflectionless_test: empty common band");
  const int N = spec.center_halfwidth;
  const double JN = spec.coupling(N);
  ReflectionReport rep;
  for (double E : grid) {
    const SMatrix sm = scattering_matrix(spec, E);
    rep.max_diag = std::max(rep.max_diag,
                            std::max(std::abs(sm.s(0, 0)), std::abs(sm.s(1, 1))));
    const complexd mp = half_line_m(spec, Side::Right, N + 1, E);  // m_N^+
    const complexd mm = half_line_m(spec, Side::Left, N, E);       // m_{N+1}^-
    rep.max_m_residual = std::max(rep.max_m_residual, std::abs(JN * JN * mp * std::conj(mm) - 1.0));
  }
  rep.is_reflectionless = rep.max_diag <= tol && rep.max_m_residual <= tol;
  return rep;
}

/// Discrete spectrum outside both tail bands: zeros of the real determinant
/// of the self-energy-dressed enclosure, refined by bisection to 1e-10.
/// An empty list means the purely-a.c. hypothesis is plausibly satisfied.
inline std::vector<double> detect_bound_states(const ChainSpec& spec) {
  const AcBand band = ac_band(spec);

  // real determinant of the dressed enclosure (real for E outside both bands)
  const int lo = std::min({-spec.center_halfwidth - 1, spec.modification_min(), 0}) - 2;
  const int hi = std::max({spec.center_halfwidth + 1, spec.modification_max(), 0}) + 2;
  const int n = hi - lo + 1;
  auto dressed_det = [&](double E) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int x = lo; x <= hi; ++x) A(x - lo, x - lo) = spec.field(x) - E;
    for (int x = lo; x < hi; ++x) {
      const double J = spec.coupling(x);
      A(x - lo, x - lo + 1) = J;
      A(x - lo + 1, x - lo) = J;
    }
    const double Jl = spec.coupling(lo - 1);
    const double Jr = spec.coupling(hi);
    A(0, 0) -= Jl * Jl * tail_m(spec.left_tail.J, spec.left_tail.v, E).real();
    A(n - 1, n - 1) -= Jr * Jr * tail_m(spec.right_tail.J, spec.right_tail.v, E).real();
    return A.determinant();
  };

  // Gershgorin range of the full operator
  double vmin = std::min(spec.left_tail.v, spec.right_tail.v);
  double vmax = std::max(spec.left_tail.v, spec.right_tail.v);
  double jmax = std::max(std::abs(spec.left_tail.J), std::abs(spec.right_tail.J));
  for (int x = lo; x <= hi; ++x) {
    vmin = std::min(vmin, spec.field(x));
    vmax = std::max(vmax, spec.field(x));
    jmax = std::max(jmax, std::abs(spec.coupling(x)));
  }
  const double lo_E = vmin - 2.0 * jmax - 0.5;
  const double hi_E = vmax + 2.0 * jmax + 0.5;

  const double edge_margin = 1e-6;
  auto inside_a_band = [&](double E) {
    return (E > band.left_lo - edge_margin && E < band.left_hi + edge_margin) ||
           (E > band.right_lo - edge_margin && E < band.right_hi + edge_margin);
  };

  std::vector<double> roots;
  const double step = 1e-2;
  double prevE = 0.0, prevD = 0.0;
  bool have_prev = false;
  for (double E = lo_E; E <= hi_E + 0.5 * step; E += step) {
    if (inside_a_band(E)) {
      have_prev = false;
      continue;
    }
    const double d = dressed_det(E);
    if (have_prev && ((prevD < 0.0) != (d < 0.0))) {
      double a = prevE, b = E, fa = prevD;
      while (b - a > 1e-10) {
        const double m = 0.5 * (a + b);
        const double fm = dressed_det(m);
        if ((fa < 0.0) == (fm < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prevE = E;
    prevD = d;
    have_prev = true;
  }
  return roots;
}

}  // namespace xyent
