#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "xyent/asymptotics.hpp"

namespace xyent {

enum class RateSource { EPlus, FcsPlus };

struct RateFunctionQuery {
  RateSource source = RateSource::EPlus;
  double theta = 0.0;
  double bracket_growth = 2.0;
  double tolerance = 1e-9;  // on the minimizing alpha
};

namespace detail {

// central difference with one Richardson step (h and h/2)
inline double derivative(const std::function<double(double)>& f, double x, double h) {
  const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
  const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

inline double second_derivative(const std::function<double(double)>& f, double x, double h) {
  const double f0 = f(x);
  auto dd = [&](double step) { return (f(x + step) - 2.0 * f0 + f(x - step)) / (step * step); };
  const double d1 = dd(h);
  const double d2 = dd(0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace detail

/// Legendre transform I(theta) = -inf_alpha (alpha theta + e(alpha)) of a
/// convex limiting generating function; +inf when theta lies outside the
/// closure of the range of -e'.
inline double legendre_transform(const std::function<double(double)>& e, double theta,
                                 double growth, double tol) {
  const double h = 1e-5;  // derivative step for the root finder
  auto slope = [&](double a) { return detail::derivative(e, a, h) + theta; };

  // e' is increasing; bracket a root of slope
  double lo = -1.0, hi = 2.0;
  double slo = slope(lo), shi = slope(hi);
  const double kAlphaMax = 64.0;
  while (slo > 0.0) {  // need slope(lo) <= 0 <= slope(hi)
    lo = lo * growth - 1.0;
    if (lo < -kAlphaMax) return std::numeric_limits<double>::infinity();
    slo = slope(lo);
  }
  while (shi < 0.0) {
    hi = hi * growth + 1.0;
    if (hi > kAlphaMax) return std::numeric_limits<double>::infinity();
    shi = slope(hi);
  }

  int iter = 0;
  while (hi - lo > tol) {
    if (++iter > 200) throw std::runtime_error("legendre_transform: optimizer did not converge");
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double astar = 0.5 * (lo + hi);
  return -(astar * theta + e(astar));
}

/// Rate function of the steady-state entropy production statistics.
inline double rate_function(const RateFunctionQuery& q, const LimitContext& ctx,
                            double quad_tol = 1e-9) {
  if (ctx.trivial())
    return q.theta == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  std::function<double(double)> e;
  if (q.source == RateSource::EPlus)
    e = [&](double a) { return e_plus(ctx, a, quad_tol); };
  else
    e = [&](double a) { return e_p_plus(ctx, 2.0, a, quad_tol); };
  return legendre_transform(e, q.theta, q.bracket_growth, q.tolerance);
}

inline double rate_function(const RateFunctionQuery& q, const ChainSpec& spec,
                            double quad_tol = 1e-9) {
  return rate_function(q, make_limit_context(spec), quad_tol);
}

/// CLT variance D_+ = e_+''(0), from the quadrature of the explicit
/// second-derivative integrand at alpha = 0.
inline double clt_variance(const LimitContext& ctx, double tol = 1e-8) {
  if (ctx.trivial()) return 0.0;
  return e_plus_second_derivative_at_zero(ctx, tol);
}

inline double clt_variance(const ChainSpec& spec, double tol = 1e-8) {
  return clt_variance(make_limit_context(spec), tol);
}

/// Finite-difference cross-check of D_+ against e_+ itself.
inline double clt_variance_fd(const LimitContext& ctx, double h = 2e-2, double quad_tol = 1e-12) {
  if (ctx.trivial()) return 0.0;
  return detail::second_derivative([&](double a) { return e_plus(ctx, a, quad_tol); }, 0.0, h);
}

}  // namespace xyent
