#pragma once

// Run configuration: a single JSON document with strict key validation;
// command-line flags override individual keys.

#include "stagmls/core.hpp"
#include "stagmls/driver.hpp"
#include "stagmls/problems.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stagmls::config {

struct RunConfig {
  std::string problem;
  int resolution = 0;    // N; dx = domain extent / N
  double dx = 0.0;       // alternative to N
  double eta = -1.0;     // absolute perturbation; only meaningful with a fixed dx
  double eta_factor = 0.1;
  int m = 2;
  bool allow_any_m = false;
  double epsilon_multiplier = 0.0;
  double safety = 1.0;
  std::string kernel = "wendland";
  int trunc_power = 4;
  double cond_limit = 1e12;
  std::string mu_rule = "arithmetic";
  std::string bc;  // "", "dirichlet", "neumann"
  std::string scheme = "staggered";
  std::string solver = "direct";
  double tol = 1e-10;
  int max_iterations = 5000;
  int restart = 50;
  std::string nullspace = "pin";
  std::uint64_t seed = 0;
  std::string out = "out";
  std::vector<int> resolutions;
  bool compare_collocated = false;
  double contrast = 2.0;  // dielectric-cylinder inclusion permittivity
  std::string raster_path;
  std::vector<problems::GrayBin> raster_mapping;
  std::string probe_axis = "x";
  double probe_value = 0.5;
  std::string probe_field = "flux";
  bool dump_stencils = false;
  bool dump_matrix = false;
};

/// Parses and validates a JSON document; unknown keys are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Full validation (also called by parse_config after merging overrides).
void validate(const RunConfig& cfg);

int problem_dimension(const std::string& problem_id);

driver::RunOptions to_run_options(const RunConfig& cfg);
problems::Problem<2> make_problem_2d(const RunConfig& cfg);
problems::Problem<3> make_problem_3d(const RunConfig& cfg);

/// dx for a single-resolution run (solve/probe/generate).
double resolve_dx(const RunConfig& cfg, double domain_extent);

}  // namespace stagmls::config

namespace stagmls::commands {

int cmd_generate(const config::RunConfig& cfg);
int cmd_solve(const config::RunConfig& cfg);
int cmd_convergence(const config::RunConfig& cfg);
int cmd_probe(const config::RunConfig& cfg);

}  // namespace stagmls::commands
