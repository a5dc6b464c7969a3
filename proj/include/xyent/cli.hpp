#pragma once

// Subcommand implementations shared by the xyent tool and the test suite.
// Every command renders its result into a string (CSV or JSON) so outputs
// are byte-stable; file and manifest writing is layered on top.

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "xyent/asymptotics.hpp"
#include "xyent/chain.hpp"
#include "xyent/deviations.hpp"
#include "xyent/finite.hpp"
#include "xyent/report.hpp"
#include "xyent/scattering.hpp"
#include "xyent/spin.hpp"

namespace xyent::cli {

struct RunResult {
  std::string content;
  std::vector<std::string> warnings;
};

/// "p:2", "p:inf", "es", "gc:50" -> FunctionalKind.
inline FunctionalKind parse_kind(const std::string& item) {
  if (item == "es") return FunctionalKind::es();
  if (item.rfind("gc:", 0) == 0) return FunctionalKind::gc(std::stod(item.substr(3)));
  if (item.rfind("p:", 0) == 0) {
    const std::string v = item.substr(2);
    if (v == "inf") return FunctionalKind::pressure(std::numeric_limits<double>::infinity());
    return FunctionalKind::pressure(std::stod(v));
  }
  throw std::invalid_argument("unknown functional kind '" + item + "' (use p:<order>|p:inf|es|gc:<s>)");
}

inline std::vector<FunctionalKind> parse_kinds(const std::string& text) {
  std::vector<FunctionalKind> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(parse_kind(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

inline std::string kind_name(const FunctionalKind& k) {
  switch (k.type) {
    case FunctionalKind::Type::Pressure: return "pressure";
    case FunctionalKind::Type::ES: return "es";
    case FunctionalKind::Type::GC: return "gc";
  }
  return "?";
}

/// Truncation radius large enough that the light cone of the run stays away
/// from the Dirichlet walls (margin 10 sites beyond speed 2 max|J|).
inline bool light_cone_ok(const ChainSpec& spec, int M, double horizon) {
  double jmax = std::max(std::abs(spec.left_tail.J), std::abs(spec.right_tail.J));
  for (const auto& [x, p] : spec.window) jmax = std::max(jmax, std::abs(p.J));
  const int radius = std::max(std::abs(spec.modification_min()), spec.modification_max());
  return M - radius >= 2.0 * jmax * horizon + 10.0;
}

inline RunResult run_finite(const ChainSpec& spec, int M, const std::vector<double>& times,
                            const std::vector<double>& alphas,
                            const std::vector<FunctionalKind>& kinds, int threads) {
  RunResult res;
  const FiniteChain chain = build_finite_chain(spec, M);
  const FiniteFunctionals ff(chain);

  for (const auto& k : kinds) {
    double horizon = 0.0;
    for (double t : times)
      horizon = std::max(horizon, std::abs(t) + (k.type == FunctionalKind::Type::GC ? std::abs(k.s) : 0.0));
    if (k.type == FunctionalKind::Type::GC && !light_cone_ok(spec, M, horizon))
      res.warnings.push_back("light cone of gc:" + fmt17(k.s) +
                             " reaches the truncation walls; increase M");
  }

  struct Row {
    const FunctionalKind* kind;
    double t, alpha, value;
  };
  std::vector<Row> rows;
  for (const auto& k : kinds)
    for (double t : times)
      for (double a : alphas) rows.push_back({&k, t, a, 0.0});
  parallel_for(static_cast<int>(rows.size()), threads,
               [&](int i) { rows[i].value = ff.value(*rows[i].kind, rows[i].t, rows[i].alpha); });

  std::ostringstream out;
  out << "kind,p,s,t,alpha,value\n";
  for (const auto& r : rows) {
    out << kind_name(*r.kind) << ',';
    if (r.kind->type == FunctionalKind::Type::Pressure)
      out << (std::isinf(r.kind->p) ? std::string("inf") : fmt17(r.kind->p));
    out << ',';
    if (r.kind->type == FunctionalKind::Type::GC) out << fmt17(r.kind->s);
    out << ',' << fmt17(r.t) << ',' << fmt17(r.alpha) << ',' << fmt17(r.value) << '\n';
  }
  res.content = out.str();
  return res;
}

inline RunResult run_converge(const ChainSpec& spec, const std::vector<double>& Ms,
                              const std::vector<double>& times, double alpha,
                              const FunctionalKind& kind, double tol, int threads) {
  RunResult res;
  const LimitContext ctx = make_limit_context(spec);
  if (ctx.hypothesis_violated)
    res.warnings.push_back("hypothesis violated: h not purely a.c. (bound states present)");
  const double limit = kind.type == FunctionalKind::Type::Pressure
                           ? e_p_plus(ctx, kind.p, alpha, tol)
                           : e_plus(ctx, alpha, tol);

  struct Row {
    int M;
    double t, scaled;
    bool skip;
  };
  std::vector<Row> rows;
  for (double Md : Ms)
    for (double t : times) rows.push_back({static_cast<int>(Md), t, 0.0, t == 0.0});
  parallel_for(static_cast<int>(rows.size()), threads, [&](int i) {
    if (rows[i].skip) return;
    const FiniteChain chain = build_finite_chain(spec, rows[i].M);
    rows[i].scaled = FiniteFunctionals(chain).value(kind, rows[i].t, alpha) / rows[i].t;
  });

  std::ostringstream out;
  out << "M,t,scaled_value,abs_err\n";
  for (const auto& r : rows) {
    if (r.skip) continue;  // (1/t) undefined at t = 0
    out << r.M << ',' << fmt17(r.t) << ',' << fmt17(r.scaled) << ','
        << fmt17(std::abs(r.scaled - limit)) << '\n';
  }
  res.content = out.str();
  return res;
}

inline RunResult run_scatter(const ChainSpec& spec, const std::vector<double>& energies,
                             int threads) {
  RunResult res;
  const int N = spec.center_halfwidth;
  const double JN = spec.coupling(N);
  struct Row {
    SMatrix sm;
    double m_residual;
  };
  std::vector<Row> rows(energies.size());
  parallel_for(static_cast<int>(energies.size()), threads, [&](int i) {
    const double E = energies[i];
    rows[i].sm = scattering_matrix(spec, E);
    const complexd mp = half_line_m(spec, Side::Right, N + 1, E);
    const complexd mm = half_line_m(spec, Side::Left, N, E);
    rows[i].m_residual = std::abs(JN * JN * mp * std::conj(mm) - 1.0);
  });

  std::ostringstream out;
  out << "E,re_sll,im_sll,re_slr,im_slr,re_srl,im_srl,re_srr,im_srr,abs_sll,"
         "unitarity_residual,reflectionless\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& s = rows[i].sm.s;
    const bool refl = std::max(std::abs(s(0, 0)), std::abs(s(1, 1))) <= 1e-8 &&
                      rows[i].m_residual <= 1e-8;
    out << fmt17(energies[i]) << ',' << fmt17(s(0, 0).real()) << ',' << fmt17(s(0, 0).imag())
        << ',' << fmt17(s(0, 1).real()) << ',' << fmt17(s(0, 1).imag()) << ','
        << fmt17(s(1, 0).real()) << ',' << fmt17(s(1, 0).imag()) << ',' << fmt17(s(1, 1).real())
        << ',' << fmt17(s(1, 1).imag()) << ',' << fmt17(std::abs(s(0, 0))) << ','
        << fmt17(rows[i].sm.unitarity_residual) << ',' << (refl ? 1 : 0) << '\n';
  }
  res.content = out.str();
  return res;
}

inline RunResult run_ness(const ChainSpec& spec, double tol) {
  RunResult res;
  const LimitContext ctx = make_limit_context(spec);
  const NessFlux nf = ness_flux(ctx, tol);
  if (nf.bound_state_warning)
    res.warnings.push_back("hypothesis violated: h not purely a.c. (bound states present)");
  nlohmann::json j;
  j["flux_l"] = nf.flux_l;
  j["flux_r"] = nf.flux_r;
  j["sigma_plus"] = nf.sigma_plus;
  j["bound_state_warning"] = nf.bound_state_warning;
  res.content = j.dump(2) + "\n";
  return res;
}

inline RunResult run_ldp(const ChainSpec& spec, const std::vector<double>& thetas, double tol,
                         int threads) {
  RunResult res;
  const LimitContext ctx = make_limit_context(spec);
  if (ctx.hypothesis_violated)
    res.warnings.push_back("hypothesis violated: h not purely a.c. (bound states present)");
  struct Row {
    double Ip, Ifcs, Ifcs_neg;
  };
  std::vector<Row> rows(thetas.size());
  parallel_for(static_cast<int>(thetas.size()), threads, [&](int i) {
    RateFunctionQuery q;
    q.theta = thetas[i];
    q.source = RateSource::EPlus;
    rows[i].Ip = rate_function(q, ctx, tol);
    q.source = RateSource::FcsPlus;
    rows[i].Ifcs = rate_function(q, ctx, tol);
    q.theta = -thetas[i];
    rows[i].Ifcs_neg = rate_function(q, ctx, tol);
  });

  std::ostringstream out;
  out << "theta,I_plus,I_fcs,symmetry_residual\n";
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double sym = rows[i].Ifcs - rows[i].Ifcs_neg - thetas[i];
    out << fmt17(thetas[i]) << ',' << fmt17(rows[i].Ip) << ',' << fmt17(rows[i].Ifcs) << ','
        << fmt17(sym) << '\n';
  }
  res.content = out.str();
  return res;
}

inline RunResult run_oracle(const ChainSpec& spec, int M, double t,
                            const std::vector<double>& alphas) {
  RunResult res;
  const FiniteChain chain = build_finite_chain(spec, M);
  const FiniteFunctionals ff(chain);
  const SpinSystem sys = build_spin_system(spec, M);

  const JwReport jw = jw_spectrum_check(sys, chain);
  const FcsMeasure meas = fcs_measure(sys, t);
  if (meas.degenerate_grouping)
    res.warnings.push_back("two spectral groups of S closer than 10x grouping tolerance");

  double psum = 0.0;
  for (const auto& [phi, p] : meas.atoms) psum += p;

  // pointwise fluctuation relation P(-phi) = e^{-t phi} P(phi)
  double fluct = 0.0;
  for (const auto& [phi, p] : meas.atoms) {
    if (phi <= 0.0) continue;
    double pneg = 0.0;
    for (const auto& [phi2, p2] : meas.atoms)
      if (std::abs(phi2 + phi) < 1e-12 * std::max(1.0, std::abs(phi))) pneg += p2;
    fluct = std::max(fluct, std::abs(pneg - std::exp(-t * phi) * p));
  }

  double mgf_p2 = 0.0, mgf_direct = 0.0, es_dev = 0.0;
  for (double a : alphas) {
    const double mgf = fcs_mgf(meas, t, a);
    mgf_p2 = std::max(mgf_p2, std::abs(mgf - ff.value(FunctionalKind::pressure(2.0), t, a)));
    mgf_direct = std::max(mgf_direct, std::abs(mgf - fcs_mgf_direct(sys, t, a)));
    es_dev = std::max(es_dev, std::abs(es_oracle(sys, t, a) - ff.value(FunctionalKind::es(), t, a)));
  }
  const double relent_dev =
      std::abs(relative_entropy(sys, t) + t * ff.mean_entropy_production(t));

  nlohmann::json j;
  j["M"] = M;
  j["t"] = t;
  j["jw_max_deviation"] = jw.max_deviation;
  j["fcs_normalization_error"] = std::abs(psum - 1.0);
  j["fluctuation_residual"] = fluct;
  j["mgf_vs_pressure2"] = mgf_p2;
  j["mgf_vs_direct"] = mgf_direct;
  j["es_max_deviation"] = es_dev;
  j["relative_entropy_deviation"] = relent_dev;
  j["max_deviation"] = std::max({jw.max_deviation, std::abs(psum - 1.0), fluct, mgf_p2,
                                 mgf_direct, es_dev, relent_dev});
  res.content = j.dump(2) + "\n";
  return res;
}

}  // namespace xyent::cli
