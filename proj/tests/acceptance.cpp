// Acceptance suite: one criterion per function, each printing a single
// PASS/FAIL line. Run with no arguments for all criteria or with a number
// 1..8 for one of them. Exit code is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <xyent/asymptotics.hpp>
#include <xyent/chain.hpp>
#include <xyent/deviations.hpp>
#include <xyent/finite.hpp>
#include <xyent/scattering.hpp>
#include <xyent/spin.hpp>

#include "oracles.hpp"

using namespace xyent;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

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

// frozen pseudo-random window over sites [-1, 1] so every truncation M >= 1 works
ChainSpec random_window_chain(unsigned seed = 42) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uj(0.6, 1.4), uv(-0.5, 0.5);
  ChainSpec s = free_chain();
  for (int x = -1; x <= 1; ++x) s.window[x] = SiteParams{uj(rng), uv(rng)};
  return s;
}

struct Checker {
  std::vector<std::string> failures;
  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void require_le(double value, double bound, const std::string& what) {
    if (!(value <= bound))
      failures.push_back(what + " = " + std::to_string(value) + " > " + std::to_string(bound));
  }
  void require_gt(double value, double bound, const std::string& what) {
    if (!(value > bound))
      failures.push_back(what + " = " + std::to_string(value) + " <= " + std::to_string(bound));
  }
};

// 1. Jordan-Wigner oracle equivalence between the spin and fermion modules.
Checker criterion1() {
  Checker c;
  const std::vector<double> alphas{-0.5, 0.25, 0.5, 0.75, 1.5};
  for (const ChainSpec& spec : {free_chain(), random_window_chain()}) {
    for (int M : {1, 2, 3}) {
      const FiniteChain chain = build_finite_chain(spec, M);
      const FiniteFunctionals ff(chain);
      const SpinSystem sys = build_spin_system(spec, M);
      const auto tag = " (M=" + std::to_string(M) + ")";

      c.require_le(jw_spectrum_check(sys, chain).max_deviation, 1e-8, "jw spectrum dev" + tag);
      for (double t : {0.5, 2.0}) {
        const FcsMeasure meas = fcs_measure(sys, t);
        for (double a : alphas) {
          c.require_le(std::abs(fcs_mgf(meas, t, a) - ff.value(FunctionalKind::pressure(2.0), t, a)),
                       1e-8, "fcs vs p=2" + tag);
          c.require_le(std::abs(es_oracle(sys, t, a) - ff.value(FunctionalKind::es(), t, a)),
                       1e-8, "es oracle" + tag);
        }
        c.require_le(std::abs(relative_entropy(sys, t) + t * ff.mean_entropy_production(t)),
                     1e-8, "relative entropy vs production" + tag);
      }
    }
  }
  return c;
}

// 2. Fluctuation relation of the two-time measurement statistics.
Checker criterion2() {
  Checker c;
  const SpinSystem sys = build_spin_system(free_chain(1.0, 2.0), 2);
  const double t = 1.0;
  const FcsMeasure meas = fcs_measure(sys, t);
  for (const auto& [phi, p] : meas.atoms) {
    if (phi <= 0.0) continue;
    double pneg = 0.0;
    for (const auto& [phi2, p2] : meas.atoms)
      if (std::abs(phi2 + phi) < 1e-10) pneg += p2;
    c.require_le(std::abs(pneg - std::exp(-t * phi) * p), 1e-8,
                 "pointwise relation at phi=" + std::to_string(phi));
  }
  for (int i = 0; i <= 10; ++i) {
    const double a = -0.25 + 1.5 * i / 10.0;
    c.require_le(std::abs(fcs_mgf(meas, t, a) - fcs_mgf(meas, t, 1.0 - a)), 1e-9,
                 "mgf symmetry at alpha=" + std::to_string(a));
  }
  return c;
}

// 3. Structural properties of the finite-time functionals.
Checker criterion3() {
  Checker c;
  const ChainSpec spec = random_window_chain(7);
  const FiniteFunctionals ff(build_finite_chain(spec, 14));
  const double t = 1.7;
  const std::vector<double> ps{0.5, 1.0, 2.0, 4.0, kInf};

  for (double p : ps) {
    const FunctionalKind k = FunctionalKind::pressure(p);
    c.require_le(std::abs(ff.value(k, t, 0.0)), 1e-10, "value at alpha=0");
    c.require_le(std::abs(ff.value(k, t, 1.0)), 1e-10, "value at alpha=1");
    for (double a : {-0.3, 0.2, 0.37, 0.8})
      c.require_le(std::abs(ff.value(k, t, a) - ff.value(k, t, 1.0 - a)), 1e-9, "alpha symmetry");
  }
  double prev = kInf;
  for (double p : ps) {
    const double v = ff.value(FunctionalKind::pressure(p), t, 0.37);
    c.require(v <= prev + 1e-10, "p-monotonicity violated at p=" + std::to_string(p));
    prev = v;
  }
  const double target = -t * ff.mean_entropy_production(t);
  const double h = 1e-4;
  for (double p : ps) {
    const FunctionalKind k = FunctionalKind::pressure(p);
    const double d = (ff.value(k, t, h) - ff.value(k, t, -h)) / (2.0 * h);
    c.require_le(std::abs(d - target), 1e-6, "first derivative at 0, p=" + std::to_string(p));
  }
  auto second = [&](const FunctionalKind& k) {
    auto f = [&](double a) { return ff.value(k, t, a); };
    auto dd = [&](double s) { return (f(s) - 2.0 * f(0.0) + f(-s)) / (s * s); };
    return (4.0 * dd(5e-3) - dd(1e-2)) / 3.0;
  };
  c.require_le(std::abs(second(FunctionalKind::pressure(2.0)) - second(FunctionalKind::es())),
               1e-6, "second derivatives of p=2 and ES at 0");
  return c;
}

// 4. Scattering matrix correctness.
Checker criterion4() {
  Checker c;
  ChainSpec shifted = free_chain();
  shifted.center_halfwidth = 1;
  shifted.window[-1] = SiteParams{0.9, -0.2};
  shifted.window[0] = SiteParams{1.1, 0.3};

  const std::vector<ChainSpec> chains{free_chain(), defect_chain(), shifted};
  for (std::size_t ci = 0; ci < chains.size(); ++ci) {
    const AcBand band = ac_band(chains[ci]);
    for (int i = 1; i <= 200; ++i) {
      const double E = band.lo + (band.hi - band.lo) * i / 201.0;
      const SMatrix sm = scattering_matrix(chains[ci], E);
      c.require_le(sm.unitarity_residual, 1e-10, "unitarity, chain " + std::to_string(ci));
      c.require_le(sm.symmetry_residual, 1e-10, "symmetry, chain " + std::to_string(ci));
    }
  }

  // unitarity corollary identity on the defect chain
  {
    const ChainSpec s = defect_chain();
    const int N = s.center_halfwidth;
    const double Jl = s.coupling(-N - 1), Jr = s.coupling(N);
    for (int i = 1; i <= 50; ++i) {
      const double E = -1.95 + 3.9 * i / 51.0;
      const GreenSolver g(s, E);
      const double Fr = half_line_m(s, Side::Right, N + 1, E).imag();
      const double lhs = Jr * Jr * std::norm(g.entry(-N, N)) * Fr;
      const double rhs = ((Jl * g.entry(-N - 1, -N) - 1.0) * std::conj(g.entry(-N, -N))).imag();
      c.require_le(std::abs(lhs - rhs), 1e-9, "corollary identity at E=" + std::to_string(E));
    }
  }

  for (int i = 1; i <= 100; ++i) {
    const double E = -1.99 + 3.98 * i / 101.0;
    c.require_le(std::abs(scattering_matrix(free_chain(), E).s(0, 0)), 1e-10,
                 "free-chain reflection at E=" + std::to_string(E));
    const double r2 = std::norm(scattering_matrix(defect_chain(), E).s(0, 0));
    c.require_le(std::abs(r2 - oracles::bond_defect_reflection2(0.5, E)), 1e-10,
                 "transfer-matrix reflection at E=" + std::to_string(E));
  }

  ChainSpec wide = defect_chain();
  wide.center_halfwidth = 3;
  for (int i = 1; i <= 50; ++i) {
    const double E = -1.9 + 3.8 * i / 51.0;
    c.require_le(std::abs(std::abs(scattering_matrix(defect_chain(), E).s(0, 0)) -
                          std::abs(scattering_matrix(wide, E).s(0, 0))),
                 1e-9, "center-size independence at E=" + std::to_string(E));
  }
  return c;
}

// 5. Steady-state flux against the finite-time dynamics.
Checker criterion5() {
  Checker c;
  const ChainSpec spec = free_chain(1.0, 2.0);
  const NessFlux nf = ness_flux(make_limit_context(spec), 1e-9);
  const FiniteFunctionals ff(build_finite_chain(spec, 600));
  const double finite_t = ff.heat_flux(200.0, Side::Left);
  c.require_le(std::abs(nf.flux_l - finite_t), 1e-3, "flux quadrature vs finite time");

  const NessFlux eq = ness_flux(make_limit_context(free_chain(1.5, 1.5)), 1e-9);
  c.require_le(std::abs(eq.flux_l), 1e-12, "equal temperatures flux");
  c.require_le(std::abs(eq.sigma_plus), 1e-12, "equal temperatures entropy production");
  return c;
}

// 6. Large-time convergence of the scaled functionals.
Checker criterion6() {
  Checker c;
  const ChainSpec spec = free_chain(1.0, 2.0);
  const double alpha = 0.5;
  const LimitContext ctx = make_limit_context(spec);
  const double ep = e_plus(ctx, alpha, 1e-10);
  const double e2p = e_p_plus(ctx, 2.0, alpha, 1e-10);

  const FiniteFunctionals ff(build_finite_chain(spec, 400));
  double prev_es = kInf, prev_e2 = kInf;
  double last_es = kInf, last_e2 = kInf;
  for (double t : {25.0, 50.0, 100.0}) {
    last_es = std::abs(ff.value(FunctionalKind::es(), t, alpha) / t - ep);
    last_e2 = std::abs(ff.value(FunctionalKind::pressure(2.0), t, alpha) / t - e2p);
    c.require(last_es < prev_es, "ES error not decreasing at t=" + std::to_string(t));
    c.require(last_e2 < prev_e2, "p=2 error not decreasing at t=" + std::to_string(t));
    prev_es = last_es;
    prev_e2 = last_e2;
  }
  c.require_le(last_es, 5e-3, "|(1/t)ES_t - e_+| at t=100");
  c.require_le(last_e2, 5e-3, "|(1/t)e_{2,t} - e_{2,+}| at t=100");

  const FiniteFunctionals fb(build_finite_chain(spec, 800));
  const double gc = fb.value(FunctionalKind::gc(50.0), 100.0, alpha) / 100.0;
  c.require_le(std::abs(gc - ep), 1e-2, "|(1/t)GC_t(s=50) - e_+| at t=100");
  return c;
}

// 7. Reflectionless equalities of the limiting functionals.
Checker criterion7() {
  Checker c;
  const LimitContext free_ctx = make_limit_context(free_chain());
  for (int i = 0; i < 7; ++i) {
    const double a = -0.5 + 2.0 * i / 6.0;
    const double quad = e_plus(free_ctx, a, 1e-9);
    const double closed = e_plus_reflectionless_closed(1.0, 2.0, free_ctx.band, a, 1e-9);
    c.require_le(std::abs(quad - closed), 1e-7, "closed form at alpha=" + std::to_string(a));
    for (double p : {0.5, 2.0, kInf})
      c.require_le(std::abs(e_p_plus(free_ctx, p, a, 1e-9) - quad), 1e-7,
                   "p-independence at alpha=" + std::to_string(a));
  }
  const LimitContext defect_ctx = make_limit_context(defect_chain());
  c.require_gt(e_plus(defect_ctx, 1.0, 1e-9), 1e-4, "defect e_+(1)");
  c.require_gt(e_p_plus(defect_ctx, 0.5, 0.5, 1e-9) - e_p_plus(defect_ctx, 4.0, 0.5, 1e-9),
               1e-6, "strict p-monotonicity gap");
  return c;
}

// 8. Large deviations.
Checker criterion8() {
  Checker c;
  const LimitContext ctx = make_limit_context(free_chain());
  const double sigma = ness_flux(ctx, 1e-10).sigma_plus;
  auto rate = [&](const LimitContext& cx, RateSource src, double theta) {
    RateFunctionQuery q;
    q.source = src;
    q.theta = theta;
    return rate_function(q, cx, 1e-10);
  };
  for (int i = 0; i < 9; ++i) {
    const double theta = sigma * (0.25 + 2.5 * i / 8.0);
    const double res = rate(ctx, RateSource::FcsPlus, theta) -
                       rate(ctx, RateSource::FcsPlus, -theta) - theta;
    c.require_le(std::abs(res), 1e-6, "FCS rate symmetry at theta=" + std::to_string(theta));
  }
  c.require_le(std::abs(rate(ctx, RateSource::EPlus, sigma)), 1e-6, "I_+ at <sigma>_+");

  const double Dq = clt_variance(ctx, 1e-10);
  const double Df = clt_variance_fd(ctx);
  c.require_le(std::abs(Dq - Df), 1e-6, "variance dual route");

  const LimitContext dctx = make_limit_context(defect_chain());
  const double dsigma = ness_flux(dctx, 1e-10).sigma_plus;
  double gap = 0.0;
  for (double u : {-1.0, -0.3, 0.5, 1.6, 2.4})
    gap = std::max(gap, std::abs(rate(dctx, RateSource::EPlus, u * dsigma) -
                                 rate(dctx, RateSource::FcsPlus, u * dsigma)));
  c.require_gt(gap, 1e-4, "defect rate-function gap");
  return c;
}

const char* kDescriptions[8] = {
    "Jordan-Wigner oracle equivalence (spin vs fermion modules)",
    "fluctuation relation of the measurement statistics",
    "finite-time functional properties",
    "scattering matrix correctness",
    "steady-state flux vs finite-time dynamics",
    "large-time convergence of scaled functionals",
    "reflectionless equalities of the limits",
    "large-deviation rate functions",
};

}  // namespace

int main(int argc, char** argv) {
  using CriterionFn = Checker (*)();
  const CriterionFn fns[8] = {criterion1, criterion2, criterion3, criterion4,
                              criterion5, criterion6, criterion7, criterion8};

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (int i = 1; i <= 8; ++i) {
    if (only != 0 && only != i) continue;
    Checker c;
    try {
      c = fns[i - 1]();
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    if (c.failures.empty()) {
      std::printf("PASS criterion %d: %s\n", i, kDescriptions[i - 1]);
    } else {
      ++failures;
      std::printf("FAIL criterion %d: %s\n", i, kDescriptions[i - 1]);
      for (const auto& f : c.failures) std::printf("  - %s\n", f.c_str());
    }
    std::fflush(stdout);
  }
  return failures;
}
