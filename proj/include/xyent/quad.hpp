#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace xyent {

// Adaptive Gauss-Kronrod 7/15 quadrature with interval bisection.

namespace gk {

inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double kronrod = 0.0;
  double error = 0.0;
};

template <typename F>
Panel rule15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = wgk[7] * fc;
  double resg = wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * xgk[j];
    const double fsum = f(c - x) + f(c + x);
    resk += wgk[j] * fsum;
    if (j % 2 == 1) resg += wg[j / 2] * fsum;
  }
  Panel p;
  p.kronrod = resk * h;
  p.error = std::abs((resk - resg) * h);
  return p;
}

}  // namespace gk

/// Integrate f over [a, b] to absolute tolerance tol. Throws if the
/// subdivision limit is reached before the error estimate drops below tol.
template <typename F>
double integrate(F&& f, double a, double b, double tol, int max_subdivisions = 4000) {
  if (!(b > a)) return 0.0;
  struct Interval {
    double a, b, value, error;
  };
  std::vector<Interval> work;
  const gk::Panel p0 = gk::rule15(f, a, b);
  work.push_back({a, b, p0.kronrod, p0.error});
  int splits = 0;
  while (true) {
    double total_err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < work.size(); ++i) {
      total_err += work[i].error;
      if (work[i].error > work[worst].error) worst = i;
    }
    if (total_err <= tol) break;
    if (++splits > max_subdivisions)
      throw std::runtime_error("integrate: quadrature did not converge within subdivision limit");
    const Interval iv = work[worst];
    const double mid = 0.5 * (iv.a + iv.b);
    const gk::Panel pl = gk::rule15(f, iv.a, mid);
    const gk::Panel pr = gk::rule15(f, mid, iv.b);
    work[worst] = {iv.a, mid, pl.kronrod, pl.error};
    work.push_back({mid, iv.b, pr.kronrod, pr.error});
  }
  // sum in a fixed (position-sorted) order so results are reproducible
  std::sort(work.begin(), work.end(),
            [](const Interval& x, const Interval& y) { return x.a < y.a; });
  double acc = 0.0;
  for (const auto& iv : work) acc += iv.value;
  return acc;
}

}  // namespace xyent
