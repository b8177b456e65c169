#include "stagmls/config.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using stagmls::config::RunConfig;

struct Cli {
  std::string config_path;
  std::string problem, bc, scheme, solver, nullspace, mu_rule, kernel, out;
  std::string probe_axis, probe_field, raster_path;
  int resolution = 0, m = 0, max_iterations = 0, restart = 0, trunc_power = 0;
  double dx = 0, eta = 0, eta_factor = 0, epsilon_multiplier = 0, safety = 0;
  double tol = 0, contrast = 0, cond_limit = 0, probe_value = 0;
  std::uint64_t seed = 0;
  std::vector<int> resolutions;
  bool compare_collocated = false, allow_any_m = false;
  bool dump_stencils = false, dump_matrix = false;
};

void add_common(CLI::App* cmd, Cli& v) {
  cmd->add_option("--config", v.config_path, "JSON configuration file");
  cmd->add_option("--problem", v.problem,
                  "square-sine | annulus-sine | cylinder-sine | five-strip | "
                  "dielectric-cylinder | raster");
  cmd->add_option("-N,--resolution", v.resolution, "points per lattice direction");
  cmd->add_option("--dx", v.dx, "lattice spacing (alternative to -N)");
  cmd->add_option("--eta", v.eta, "absolute interior perturbation");
  cmd->add_option("--eta-factor", v.eta_factor, "perturbation as a fraction of dx");
  cmd->add_option("-m,--degree", v.m, "polynomial degree (2, 4 or 6)");
  cmd->add_flag("--allow-any-m", v.allow_any_m, "permit degrees outside {2,4,6}");
  cmd->add_option("--epsilon-multiplier", v.epsilon_multiplier,
                  "support radius as a multiple of dx (0 = auto)");
  cmd->add_option("--safety", v.safety, "neighbor-count safety factor");
  cmd->add_option("--kernel", v.kernel, "wendland | truncated-power");
  cmd->add_option("--trunc-power", v.trunc_power, "exponent for truncated-power");
  cmd->add_option("--cond-limit", v.cond_limit, "local conditioning guard");
  cmd->add_option("--mu-rule", v.mu_rule, "arithmetic | harmonic edge coefficient");
  cmd->add_option("--bc", v.bc, "dirichlet | neumann");
  cmd->add_option("--scheme", v.scheme, "staggered | collocated");
  cmd->add_option("--solver", v.solver, "direct | krylov");
  cmd->add_option("--tol", v.tol, "Krylov tolerance");
  cmd->add_option("--max-iterations", v.max_iterations, "Krylov iteration cap");
  cmd->add_option("--restart", v.restart, "GMRES restart length");
  cmd->add_option("--nullspace", v.nullspace, "pin | meanzero");
  cmd->add_option("--seed", v.seed, "point-cloud RNG seed");
  cmd->add_option("-o,--out", v.out, "output path prefix");
  cmd->add_option("--contrast", v.contrast, "dielectric inclusion permittivity");
  cmd->add_option("--raster-path", v.raster_path, "PGM image for the raster problem");
  cmd->add_flag("--dump-stencils", v.dump_stencils, "write stencil coefficient CSVs");
  cmd->add_flag("--dump-matrix", v.dump_matrix, "write the assembled MatrixMarket file");
}

RunConfig merge(const CLI::App* cmd, const Cli& v) {
  RunConfig cfg;
  if (!v.config_path.empty()) cfg = stagmls::config::load_config(v.config_path);
  auto set = [&](const char* name) { return cmd->count(name) > 0; };
  if (set("--problem")) cfg.problem = v.problem;
  if (set("--resolution")) cfg.resolution = v.resolution;
  if (set("--dx")) cfg.dx = v.dx;
  if (set("--eta")) cfg.eta = v.eta;
  if (set("--eta-factor")) cfg.eta_factor = v.eta_factor;
  if (set("--degree")) cfg.m = v.m;
  if (set("--allow-any-m")) cfg.allow_any_m = true;
  if (set("--epsilon-multiplier")) cfg.epsilon_multiplier = v.epsilon_multiplier;
  if (set("--safety")) cfg.safety = v.safety;
  if (set("--kernel")) cfg.kernel = v.kernel;
  if (set("--trunc-power")) cfg.trunc_power = v.trunc_power;
  if (set("--cond-limit")) cfg.cond_limit = v.cond_limit;
  if (set("--mu-rule")) cfg.mu_rule = v.mu_rule;
  if (set("--bc")) cfg.bc = v.bc;
  if (set("--scheme")) cfg.scheme = v.scheme;
  if (set("--solver")) cfg.solver = v.solver;
  if (set("--tol")) cfg.tol = v.tol;
  if (set("--max-iterations")) cfg.max_iterations = v.max_iterations;
  if (set("--restart")) cfg.restart = v.restart;
  if (set("--nullspace")) cfg.nullspace = v.nullspace;
  if (set("--seed")) cfg.seed = v.seed;
  if (set("--out")) cfg.out = v.out;
  if (set("--contrast")) cfg.contrast = v.contrast;
  if (set("--raster-path")) cfg.raster_path = v.raster_path;
  if (set("--dump-stencils")) cfg.dump_stencils = true;
  if (set("--dump-matrix")) cfg.dump_matrix = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stagmls: meshfree staggered GMLS solver for -div(mu grad phi) = f"};
  app.require_subcommand(0, 1);

  Cli vg, vs, vc, vp;
  CLI::App* generate = app.add_subcommand("generate", "write a point cloud CSV");
  add_common(generate, vg);
  CLI::App* solve = app.add_subcommand("solve", "solve one problem and export fields");
  add_common(solve, vs);
  CLI::App* conv = app.add_subcommand("convergence", "run a resolution sweep");
  add_common(conv, vc);
  conv->add_option("--resolutions", vc.resolutions, "lattice resolutions (>= 3)");
  conv->add_flag("--compare-collocated", vc.compare_collocated,
                 "also run the collocated scheme");
  CLI::App* probe = app.add_subcommand("probe", "sample the flux along a grid line");
  add_common(probe, vp);
  probe->add_option("--axis", vp.probe_axis, "fixed axis of the probe line (x or y)");
  probe->add_option("--value", vp.probe_value, "coordinate of the probe line");
  probe->add_option("--field", vp.probe_field, "flux | gradient");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (app.get_subcommands().empty()) {
    std::cerr << app.help() << std::endl;
    return 2;
  }

  try {
    if (generate->parsed()) return stagmls::commands::cmd_generate(merge(generate, vg));
    if (solve->parsed()) return stagmls::commands::cmd_solve(merge(solve, vs));
    if (conv->parsed()) {
      RunConfig cfg = merge(conv, vc);
      if (conv->count("--resolutions")) cfg.resolutions = vc.resolutions;
      if (conv->count("--compare-collocated")) cfg.compare_collocated = true;
      return stagmls::commands::cmd_convergence(cfg);
    }
    if (probe->parsed()) {
      RunConfig cfg = merge(probe, vp);
      if (probe->count("--axis")) cfg.probe_axis = vp.probe_axis;
      if (probe->count("--value")) cfg.probe_value = vp.probe_value;
      if (probe->count("--field")) cfg.probe_field = vp.probe_field;
      return stagmls::commands::cmd_probe(cfg);
    }
  } catch (const stagmls::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    for (const CLI::App* sub : app.get_subcommands())
      std::cerr << sub->help() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
