#include "stagmls/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace stagmls::config {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "problem",      "N",           "dx",           "eta",
    "eta_factor",   "m",           "allow_any_m",  "epsilon_multiplier",
    "safety",       "kernel",      "trunc_power",  "cond_limit",
    "mu_rule",      "bc",          "scheme",       "solver",
    "tol",          "max_iterations", "restart",   "nullspace",
    "seed",         "out",         "resolutions",  "compare_collocated",
    "contrast",     "raster_path", "raster_mapping", "probe_axis",
    "probe_value",  "probe_field", "dump_stencils", "dump_matrix"};

const std::set<std::string> kProblems = {"square-sine",  "annulus-sine", "cylinder-sine",
                                         "five-strip",   "dielectric-cylinder", "raster"};

template <class T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  for (const auto& [key, _] : j.items())
    if (!kKnownKeys.count(key)) throw ConfigError("config: unknown key '" + key + "'");

  RunConfig cfg;
  try {
    get_if(j, "problem", cfg.problem);
    get_if(j, "N", cfg.resolution);
    get_if(j, "dx", cfg.dx);
    get_if(j, "eta", cfg.eta);
    get_if(j, "eta_factor", cfg.eta_factor);
    get_if(j, "m", cfg.m);
    get_if(j, "allow_any_m", cfg.allow_any_m);
    get_if(j, "epsilon_multiplier", cfg.epsilon_multiplier);
    get_if(j, "safety", cfg.safety);
    get_if(j, "kernel", cfg.kernel);
    get_if(j, "trunc_power", cfg.trunc_power);
    get_if(j, "cond_limit", cfg.cond_limit);
    get_if(j, "mu_rule", cfg.mu_rule);
    get_if(j, "bc", cfg.bc);
    get_if(j, "scheme", cfg.scheme);
    get_if(j, "solver", cfg.solver);
    get_if(j, "tol", cfg.tol);
    get_if(j, "max_iterations", cfg.max_iterations);
    get_if(j, "restart", cfg.restart);
    get_if(j, "nullspace", cfg.nullspace);
    get_if(j, "seed", cfg.seed);
    get_if(j, "out", cfg.out);
    get_if(j, "resolutions", cfg.resolutions);
    get_if(j, "compare_collocated", cfg.compare_collocated);
    get_if(j, "contrast", cfg.contrast);
    get_if(j, "raster_path", cfg.raster_path);
    get_if(j, "probe_axis", cfg.probe_axis);
    get_if(j, "probe_value", cfg.probe_value);
    get_if(j, "probe_field", cfg.probe_field);
    get_if(j, "dump_stencils", cfg.dump_stencils);
    get_if(j, "dump_matrix", cfg.dump_matrix);
    if (j.contains("raster_mapping")) {
      for (const auto& row : j.at("raster_mapping")) {
        if (!row.is_array() || row.size() != 3)
          throw ConfigError("config: raster_mapping entries must be [lo, hi, mu]");
        cfg.raster_mapping.push_back(
            {row[0].get<int>(), row[1].get<int>(), row[2].get<double>()});
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value type: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
  if (cfg.problem.empty()) throw ConfigError("config: missing problem id");
  if (!kProblems.count(cfg.problem))
    throw ConfigError("config: unknown problem '" + cfg.problem + "'");
  if (!cfg.allow_any_m && cfg.m != 2 && cfg.m != 4 && cfg.m != 6)
    throw ConfigError("config: m must be one of 2,4,6 (use allow_any_m to override)");
  if (cfg.allow_any_m && cfg.m < 2) throw ConfigError("config: m must be >= 2");
  if (cfg.resolution < 0 || cfg.dx < 0.0) throw ConfigError("config: N and dx must be positive");
  if (cfg.eta_factor < 0.0 || cfg.eta_factor >= 0.5)
    throw ConfigError("config: eta_factor must be in [0, 0.5)");
  if (cfg.kernel != "wendland" && cfg.kernel != "truncated-power")
    throw ConfigError("config: kernel must be 'wendland' or 'truncated-power'");
  if (cfg.mu_rule != "arithmetic" && cfg.mu_rule != "harmonic")
    throw ConfigError("config: mu_rule must be 'arithmetic' or 'harmonic'");
  if (!cfg.bc.empty() && cfg.bc != "dirichlet" && cfg.bc != "neumann")
    throw ConfigError("config: bc must be 'dirichlet' or 'neumann'");
  if (cfg.scheme != "staggered" && cfg.scheme != "collocated")
    throw ConfigError("config: scheme must be 'staggered' or 'collocated'");
  if (cfg.solver != "direct" && cfg.solver != "krylov")
    throw ConfigError("config: solver must be 'direct' or 'krylov'");
  if (cfg.nullspace != "pin" && cfg.nullspace != "meanzero")
    throw ConfigError("config: nullspace must be 'pin' or 'meanzero'");
  if (cfg.probe_axis != "x" && cfg.probe_axis != "y")
    throw ConfigError("config: probe_axis must be 'x' or 'y'");
  if (cfg.probe_field != "flux" && cfg.probe_field != "gradient")
    throw ConfigError("config: probe_field must be 'flux' or 'gradient'");
  if (cfg.problem == "raster" && cfg.raster_path.empty())
    throw ConfigError("config: raster problem needs raster_path");
  if (cfg.problem == "raster" && cfg.raster_mapping.empty())
    throw ConfigError("config: raster problem needs raster_mapping");
  if (!(cfg.tol > 0.0)) throw ConfigError("config: tol must be positive");
  if (!(cfg.contrast > 0.0)) throw ConfigError("config: contrast must be positive");
}

int problem_dimension(const std::string& problem_id) {
  return problem_id == "cylinder-sine" ? 3 : 2;
}

driver::RunOptions to_run_options(const RunConfig& cfg) {
  driver::RunOptions opt;
  opt.stencil.m = cfg.m;
  opt.stencil.epsilon_multiplier = cfg.epsilon_multiplier;
  opt.stencil.safety = cfg.safety;
  opt.stencil.kernel = (cfg.kernel == "wendland") ? neighbors::KernelFamily::WendlandC2
                                                  : neighbors::KernelFamily::TruncatedPower;
  opt.stencil.trunc_power = cfg.trunc_power;
  opt.stencil.cond_limit = cfg.cond_limit;
  opt.stencil.mu_rule = (cfg.mu_rule == "harmonic") ? gmls::MuEdgeRule::Harmonic
                                                    : gmls::MuEdgeRule::Arithmetic;
  opt.solver.method = (cfg.solver == "krylov") ? system::SolverMethod::IterativeKrylov
                                               : system::SolverMethod::DirectLU;
  opt.solver.tol = cfg.tol;
  opt.solver.max_iterations = cfg.max_iterations;
  opt.solver.restart = cfg.restart;
  opt.scheme = (cfg.scheme == "collocated") ? driver::Scheme::Collocated
                                            : driver::Scheme::Staggered;
  opt.eta_factor = cfg.eta_factor;
  opt.seed = cfg.seed;
  if (cfg.bc == "dirichlet") opt.bc = geometry::PointKind::DirichletBoundary;
  if (cfg.bc == "neumann") opt.bc = geometry::PointKind::NeumannBoundary;
  opt.null_space = (cfg.nullspace == "meanzero") ? driver::NullSpaceStrategy::MeanZero
                                                 : driver::NullSpaceStrategy::PinFirstBoundary;
  return opt;
}

problems::Problem<2> make_problem_2d(const RunConfig& cfg) {
  if (cfg.problem == "square-sine") return problems::square_sine();
  if (cfg.problem == "annulus-sine") return problems::annulus_sine();
  if (cfg.problem == "five-strip") return problems::five_strip_problem();
  if (cfg.problem == "dielectric-cylinder")
    return problems::dielectric_cylinder_problem(cfg.contrast, 1.0);
  if (cfg.problem == "raster")
    return problems::raster_problem(
        problems::raster_coefficient(cfg.raster_path, cfg.raster_mapping));
  throw ConfigError("config: problem '" + cfg.problem + "' is not two-dimensional");
}

problems::Problem<3> make_problem_3d(const RunConfig& cfg) {
  if (cfg.problem == "cylinder-sine") return problems::cylinder_sine();
  throw ConfigError("config: problem '" + cfg.problem + "' is not three-dimensional");
}

double resolve_dx(const RunConfig& cfg, double domain_extent) {
  if (cfg.dx > 0.0) return cfg.dx;
  if (cfg.resolution > 0) return domain_extent / cfg.resolution;
  throw ConfigError("config: need N or dx");
}

}  // namespace stagmls::config
