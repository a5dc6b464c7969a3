#include <catch2/catch_amalgamated.hpp>

#include <xyent/asymptotics.hpp>
#include <xyent/chain.hpp>
#include <xyent/finite.hpp>
#include <xyent/quad.hpp>

using namespace xyent;
using Catch::Approx;

namespace {

ChainSpec free_chain(double bl = 1.0, double br = 2.0) {
  ChainSpec s;
  s.beta_l = bl;
  s.beta_r = br;
  return s;
}

ChainSpec defect_chain(double c = 0.5) {
  ChainSpec s = free_chain();
  s.center_halfwidth = 2;
  s.window[0] = SiteParams{c, 0.0};
  return s;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("adaptive quadrature on known integrals") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12) == Approx(2.0).margin(1e-11));
  // endpoint square-root behavior, as at a band edge
  CHECK(integrate([](double x) { return std::sqrt(1.0 - x * x); }, -1.0, 1.0, 1e-10) ==
        Approx(M_PI / 2.0).margin(1e-9));
  CHECK_THROWS(integrate([](double x) { return 1.0 / std::sqrt(std::abs(x)); }, -1.0, 1.0, 1e-14, 8));
}

TEST_CASE("K matrices at special parameters") {
  const ChainSpec s = free_chain();
  const double E = 0.8;
  const SMatrix sm = scattering_matrix(s, E);

  const Eigen::Matrix2cd K0 = k_alpha(E, 0.0, sm, 1.0, 2.0);
  CHECK(std::abs(K0(0, 0) - std::exp(-1.0 * E)) < 1e-12);
  CHECK(std::abs(K0(1, 1) - std::exp(-2.0 * E)) < 1e-12);
  CHECK(std::abs(K0(0, 1)) < 1e-12);

  // equal temperatures: [s, k0] = 0 and K_alpha = K_0 for every alpha
  const Eigen::Matrix2cd Keq = k_alpha(E, 0.7, sm, 1.5, 1.5);
  const Eigen::Matrix2cd Keq0 = k_alpha(E, 0.0, sm, 1.5, 1.5);
  CHECK((Keq - Keq0).cwiseAbs().maxCoeff() < 1e-12);

  // det K_alpha = exp(tr k0) independently of alpha
  for (double a : {-0.4, 0.3, 1.2}) {
    const Eigen::Matrix2cd K = k_alpha(E, a, sm, 1.0, 2.0);
    CHECK(std::abs(K.determinant() - std::exp(-(1.0 + 2.0) * E)) < 1e-12);
  }
}

TEST_CASE("K_{alpha,p} endpoints do not depend on p") {
  const ChainSpec s = defect_chain();
  const double E = 0.6;
  const SMatrix sm = scattering_matrix(s, E);
  for (double a : {0.0, 1.0}) {
    const double d2 = log_det_1p_herm2(k_alpha_p(E, a, 2.0, sm, 1.0, 2.0));
    for (double p : {0.5, 4.0, kInf}) {
      CHECK(log_det_1p_herm2(k_alpha_p(E, a, p, sm, 1.0, 2.0)) == Approx(d2).margin(1e-10));
    }
  }
}

TEST_CASE("trace monotonicity of K_{alpha,p} in p at a defect energy") {
  const ChainSpec s = defect_chain();
  const double E = 0.6, a = 0.5;
  const SMatrix sm = scattering_matrix(s, E);
  const double t_half = k_alpha_p(E, a, 0.5, sm, 1.0, 2.0).trace().real();
  const double t_two = k_alpha_p(E, a, 2.0, sm, 1.0, 2.0).trace().real();
  const double t_four = k_alpha_p(E, a, 4.0, sm, 1.0, 2.0).trace().real();
  CHECK(t_half >= t_two - 1e-12);
  CHECK(t_two >= t_four - 1e-12);
}

TEST_CASE("the printed and conjugate-ordered couplings give the same limit") {
  // s and s* may be exchanged inside the K matrices without changing the
  // integrated functionals; check the integrand pointwise.
  const ChainSpec s = defect_chain();
  for (double E : {-1.2, 0.6, 1.7}) {
    const SMatrix sm = scattering_matrix(s, E);
    SMatrix swapped = sm;
    swapped.s = sm.s.adjoint();
    for (double a : {0.3, 0.9}) {
      const double v1 = log_det_1p_herm2(k_alpha(E, a, sm, 1.0, 2.0));
      const double v2 = log_det_1p_herm2(k_alpha(E, a, swapped, 1.0, 2.0));
      CHECK(v1 == Approx(v2).margin(1e-11));
    }
  }
}

TEST_CASE("e_plus endpoints, closed form, and p-independence on the free chain") {
  const LimitContext ctx = make_limit_context(free_chain());
  CHECK(e_plus(ctx, 0.0) == 0.0);
  for (double a : {0.25, 0.5, 0.75, 1.0, 1.4, -0.3}) {
    const double quad = e_plus(ctx, a, 1e-9);
    const double closed = e_plus_reflectionless_closed(1.0, 2.0, ctx.band, a, 1e-9);
    CHECK(quad == Approx(closed).margin(2e-9));
  }
  for (double p : {0.5, 2.0, kInf}) {
    CHECK(e_p_plus(ctx, p, 0.5, 1e-9) == Approx(e_plus(ctx, 0.5, 1e-9)).margin(2e-9));
  }
}

TEST_CASE("e_p_plus symmetry and endpoint") {
  const LimitContext ctx = make_limit_context(defect_chain());
  for (double p : {0.5, 2.0, kInf}) {
    CHECK(std::abs(e_p_plus(ctx, p, 1.0, 1e-9)) < 1e-8);
    for (double a : {0.3, 0.8, 1.3}) {
      CHECK(e_p_plus(ctx, p, a, 1e-9) == Approx(e_p_plus(ctx, p, 1.0 - a, 1e-9)).margin(2e-8));
    }
  }
}

TEST_CASE("ES-type limit is positive at alpha=1 only off reflectionless") {
  CHECK(std::abs(e_plus(make_limit_context(free_chain()), 1.0, 1e-9)) < 1e-8);
  CHECK(e_plus(make_limit_context(defect_chain()), 1.0, 1e-9) > 1e-4);
}

TEST_CASE("p-monotonicity of the limits, strict at the defect chain") {
  const LimitContext ctx = make_limit_context(defect_chain());
  double prev = std::numeric_limits<double>::infinity();
  for (double p : {0.5, 1.0, 2.0, 4.0}) {
    const double v = e_p_plus(ctx, p, 0.5, 1e-9);
    CHECK(v <= prev + 1e-9);
    prev = v;
  }
  CHECK(e_p_plus(ctx, kInf, 0.5, 1e-9) <= prev + 1e-9);
  CHECK(e_p_plus(ctx, 0.5, 0.5, 1e-9) - e_p_plus(ctx, 4.0, 0.5, 1e-9) > 1e-6);
}

TEST_CASE("strict convexity of e_plus off equilibrium") {
  const LimitContext ctx = make_limit_context(free_chain());
  const double h = 0.25;
  for (double a = -0.5; a <= 1.5; a += h) {
    const double dd = e_plus(ctx, a + h, 1e-10) - 2.0 * e_plus(ctx, a, 1e-10) +
                      e_plus(ctx, a - h, 1e-10);
    CHECK(dd > 1e-6);
  }
}

TEST_CASE("degenerate cases return exact zeros") {
  CHECK(e_plus(make_limit_context(free_chain(1.3, 1.3)), 0.7) == 0.0);
  ChainSpec disjoint = free_chain();
  disjoint.right_tail.v = 10.0;
  const LimitContext ctx = make_limit_context(disjoint);
  CHECK(ctx.band.empty());
  CHECK(e_plus(ctx, 0.7) == 0.0);
  const NessFlux nf = ness_flux(ctx);
  CHECK(nf.flux_l == 0.0);
  CHECK(nf.sigma_plus == 0.0);
}

TEST_CASE("steady fluxes: signs, antisymmetry, and equilibrium zeros") {
  const NessFlux eq = ness_flux(make_limit_context(free_chain(2.0, 2.0)));
  CHECK(eq.flux_l == 0.0);
  CHECK(eq.sigma_plus <= 1e-12);

  const NessFlux nf = ness_flux(make_limit_context(free_chain(1.0, 2.0)), 1e-9);
  CHECK(nf.flux_l > 0.0);  // heat leaves the hotter left reservoir
  CHECK(nf.flux_r == -nf.flux_l);
  CHECK(nf.sigma_plus == Approx((2.0 - 1.0) * nf.flux_l));
  CHECK(nf.sigma_plus > 0.0);
}

TEST_CASE("derivative of e_plus at zero is minus the entropy production") {
  const LimitContext ctx = make_limit_context(free_chain());
  const NessFlux nf = ness_flux(ctx, 1e-10);
  const double h = 1e-3;
  const double d = (e_plus(ctx, h, 1e-12) - e_plus(ctx, -h, 1e-12)) / (2.0 * h);
  CHECK(d == Approx(-nf.sigma_plus).margin(1e-6));
}

TEST_CASE("variance integrand matches finite differences of e_plus") {
  const LimitContext ctx = make_limit_context(free_chain());
  const double quad = e_plus_second_derivative_at_zero(ctx, 1e-10);
  auto e = [&](double a) { return e_plus(ctx, a, 1e-12); };
  auto dd = [&](double s) { return (e(s) - 2.0 * e(0.0) + e(-s)) / (s * s); };
  const double fd = (4.0 * dd(1e-2) - dd(2e-2)) / 3.0;
  CHECK(quad == Approx(fd).margin(1e-6));
  CHECK(quad > 0.0);
}

TEST_CASE("scaled finite-time functionals approach the limit") {
  const ChainSpec s = free_chain();
  const LimitContext ctx = make_limit_context(s);
  const double a = 0.5;
  const double limit = e_plus(ctx, a, 1e-10);
  const FiniteFunctionals ff(build_finite_chain(s, 120));
  const double d10 = std::abs(ff.value(FunctionalKind::es(), 10.0, a) / 10.0 - limit);
  const double d40 = std::abs(ff.value(FunctionalKind::es(), 40.0, a) / 40.0 - limit);
  CHECK(d40 < d10);
  CHECK(d40 < 2e-2);
}

TEST_CASE("bound states flag the hypothesis") {
  ChainSpec s = free_chain();
  s.center_halfwidth = 1;
  s.window[0] = SiteParams{1.0, 5.0};
  const LimitContext ctx = make_limit_context(s);
  CHECK(ctx.hypothesis_violated);
  CHECK(ness_flux(ctx).bound_state_warning);
}
