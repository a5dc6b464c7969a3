// xyent: entropic fluctuation functionals, scattering data and heat
// transport statistics of open XY spin chains in the free-fermion
// representation. Every subcommand writes a CSV or JSON report plus a
// <output>.manifest.json with the resolved parameters.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <xyent/cli.hpp>
#include <xyent/version.hpp>

namespace {

int default_threads() {
  if (const char* env = std::getenv("XYENT_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (...) {
    }
  }
  return 1;
}

struct Common {
  std::string spec_path;
  std::string out_path;
  double tol = 1e-8;
  bool strict = false;
  int threads = default_threads();
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--spec", c.spec_path, "chain spec file (JSON)")->required();
  cmd->add_option("--out", c.out_path, "output file path")->required();
  cmd->add_option("--tol", c.tol, "quadrature tolerance");
  cmd->add_flag("--strict", c.strict, "exit nonzero on warnings");
  cmd->add_option("--threads", c.threads, "grid evaluation threads (default $XYENT_THREADS or 1)");
}

int finish(const Common& c, const std::string& subcommand, const nlohmann::json& params,
           xyent::cli::RunResult res, std::chrono::steady_clock::time_point start) {
  xyent::write_file(c.out_path, res.content);
  xyent::RunManifest man;
  man.subcommand = subcommand;
  man.parameters = params;
  man.parameters["spec"] = c.spec_path;
  man.parameters["out"] = c.out_path;
  man.parameters["tol"] = c.tol;
  man.parameters["threads"] = c.threads;
  man.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  man.warnings = res.warnings;
  xyent::write_file(c.out_path + ".manifest.json", man.to_json().dump(2) + "\n");
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  return (c.strict && !res.warnings.empty()) ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropic fluctuations of open XY chains"};
  app.set_version_flag("--version", std::string(xyent::version));
  app.require_subcommand(1);

  Common c_finite, c_conv, c_scat, c_ness, c_ldp, c_orc;

  auto* cmd_finite = app.add_subcommand("finite", "finite-volume generating functions");
  int fin_M = 40;
  std::string fin_times = "1:10:10", fin_alphas = "0:1:11", fin_kinds = "p:2";
  add_common(cmd_finite, c_finite);
  cmd_finite->add_option("--M", fin_M, "truncation radius");
  cmd_finite->add_option("--times", fin_times, "t grid (start:stop:count or list)");
  cmd_finite->add_option("--alphas", fin_alphas, "alpha grid");
  cmd_finite->add_option("--kinds", fin_kinds, "comma list of p:<order>|p:inf|es|gc:<s>");

  auto* cmd_conv = app.add_subcommand("converge", "large-time convergence table");
  std::string conv_Ms = "100,200,400", conv_times = "25,50,100", conv_kind = "es";
  double conv_alpha = 0.5;
  add_common(cmd_conv, c_conv);
  cmd_conv->add_option("--Ms", conv_Ms, "truncation radii");
  cmd_conv->add_option("--times", conv_times, "t grid");
  cmd_conv->add_option("--alpha", conv_alpha, "alpha");
  cmd_conv->add_option("--kind", conv_kind, "functional kind");

  auto* cmd_scat = app.add_subcommand("scatter", "scattering matrix on an energy grid");
  std::string scat_E = "-1.9:1.9:39";
  add_common(cmd_scat, c_scat);
  cmd_scat->add_option("--energies", scat_E, "energy grid");

  auto* cmd_ness = app.add_subcommand("ness", "steady-state heat fluxes");
  add_common(cmd_ness, c_ness);

  auto* cmd_ldp = app.add_subcommand("ldp", "large-deviation rate functions");
  std::string ldp_thetas = "0:0.2:9";
  add_common(cmd_ldp, c_ldp);
  cmd_ldp->add_option("--thetas", ldp_thetas, "theta grid");

  auto* cmd_orc = app.add_subcommand("oracle", "many-body cross-check report");
  int orc_M = 2;
  double orc_t = 1.0;
  std::string orc_alphas = "-0.5,0.25,0.5,0.75,1.5";
  add_common(cmd_orc, c_orc);
  cmd_orc->add_option("--M", orc_M, "truncation radius (2M+1 <= 11)");
  cmd_orc->add_option("--t", orc_t, "measurement time");
  cmd_orc->add_option("--alphas", orc_alphas, "alpha grid");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto start = std::chrono::steady_clock::now();
    if (cmd_finite->parsed()) {
      const auto spec = xyent::parse_chain_spec(c_finite.spec_path);
      auto res = xyent::cli::run_finite(spec, fin_M, xyent::parse_grid(fin_times),
                                        xyent::parse_grid(fin_alphas),
                                        xyent::cli::parse_kinds(fin_kinds), c_finite.threads);
      nlohmann::json p{{"M", fin_M}, {"times", fin_times}, {"alphas", fin_alphas}, {"kinds", fin_kinds}};
      return finish(c_finite, "finite", p, std::move(res), start);
    }
    if (cmd_conv->parsed()) {
      const auto spec = xyent::parse_chain_spec(c_conv.spec_path);
      auto res = xyent::cli::run_converge(spec, xyent::parse_grid(conv_Ms),
                                          xyent::parse_grid(conv_times), conv_alpha,
                                          xyent::cli::parse_kind(conv_kind), c_conv.tol,
                                          c_conv.threads);
      nlohmann::json p{{"Ms", conv_Ms}, {"times", conv_times}, {"alpha", conv_alpha}, {"kind", conv_kind}};
      return finish(c_conv, "converge", p, std::move(res), start);
    }
    if (cmd_scat->parsed()) {
      const auto spec = xyent::parse_chain_spec(c_scat.spec_path);
      auto res = xyent::cli::run_scatter(spec, xyent::parse_grid(scat_E), c_scat.threads);
      nlohmann::json p{{"energies", scat_E}};
      return finish(c_scat, "scatter", p, std::move(res), start);
    }
    if (cmd_ness->parsed()) {
      const auto spec = xyent::parse_chain_spec(c_ness.spec_path);
      auto res = xyent::cli::run_ness(spec, c_ness.tol);
      return finish(c_ness, "ness", nlohmann::json::object(), std::move(res), start);
    }
    if (cmd_ldp->parsed()) {
      const auto spec = xyent::parse_chain_spec(c_ldp.spec_path);
      auto res = xyent::cli::run_ldp(spec, xyent::parse_grid(ldp_thetas), c_ldp.tol, c_ldp.threads);
      nlohmann::json p{{"thetas", ldp_thetas}};
      return finish(c_ldp, "ldp", p, std::move(res), start);
    }
    if (cmd_orc->parsed()) {
      const auto spec = xyent::parse_chain_spec(c_orc.spec_path);
      auto res = xyent::cli::run_oracle(spec, orc_M, orc_t, xyent::parse_grid(orc_alphas));
      nlohmann::json p{{"M", orc_M}, {"t", orc_t}, {"alphas", orc_alphas}};
      return finish(c_orc, "oracle", p, std::move(res), start);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
