#include "stagmls/config.hpp"
#include "stagmls/io.hpp"

#include <cstdio>
#include <iostream>

namespace stagmls::commands {

using config::RunConfig;

namespace {

template <int D>
problems::Problem<D> make_problem(const RunConfig& cfg) {
  if constexpr (D == 2)
    return config::make_problem_2d(cfg);
  else
    return config::make_problem_3d(cfg);
}

template <int D>
driver::RunOptions options_for_dx(const RunConfig& cfg, double dx) {
  driver::RunOptions opt = config::to_run_options(cfg);
  if (cfg.eta >= 0.0) {
    if (cfg.eta >= 0.5 * dx) throw ConfigError("config: eta must be < dx/2");
    opt.eta_factor = cfg.eta / dx;
  }
  return opt;
}

template <int D>
int generate_impl(const RunConfig& cfg) {
  const problems::Problem<D> prob = make_problem<D>(cfg);
  const double dx = config::resolve_dx(cfg, prob.domain.extent());
  driver::RunOptions opt = options_for_dx<D>(cfg, dx);
  const geometry::PointKind bc = opt.bc.value_or(prob.default_bc);
  auto cloud = geometry::discretize<D>(
      prob.domain, dx, opt.eta_factor * dx, opt.seed,
      [bc](const Vec<D>&, const Vec<D>&) { return bc; });
  io::save_cloud_csv<D>(cloud, cfg.out + "_cloud.csv");
  std::cout << "points=" << cloud.size()
            << " interior=" << cloud.count(geometry::PointKind::Interior)
            << " boundary=" << cloud.size() - cloud.count(geometry::PointKind::Interior)
            << " h=" << fmt17(cloud.h);
  if (cloud.size() <= 20000) {
    const auto spacing = geometry::characteristic_spacing<D>(cloud);
    std::cout << " max_min_neighbor=" << fmt17(spacing.max_min_neighbor);
  }
  std::cout << "\nwrote " << cfg.out << "_cloud.csv\n";
  return 0;
}

template <int D>
int solve_impl(const RunConfig& cfg) {
  const problems::Problem<D> prob = make_problem<D>(cfg);
  const double dx = config::resolve_dx(cfg, prob.domain.extent());
  const driver::RunOptions opt = options_for_dx<D>(cfg, dx);
  const driver::SolveResult<D> r = driver::solve_problem<D>(prob, dx, opt);

  io::save_field_csv<D>(r.cloud, r.phi, r.flux, cfg.out + ".csv");
  io::save_field_vtk<D>(r.cloud, r.phi, r.flux, cfg.out + ".vtk");
  if (cfg.dump_stencils) {
    io::save_stencil_dump<D>(r.stencils.rows, cfg.out + "_stencils.csv");
    io::save_stencil_sizes<D>(r.stencils.rows, cfg.out + "_stencil_sizes.csv");
  }
  std::cout << "points=" << r.cloud.size() << " solver=" << r.report.solver
            << " iterations=" << r.report.iterations
            << " residual=" << fmt17(r.report.rel_residual)
            << " seconds=" << fmt17(r.report.seconds) << "\n";
  if (prob.has_exact()) {
    std::cout << "e_l2=" << fmt17(problems::error_l2<D>(r.cloud, r.phi, prob.phi_exact))
              << " e_h1="
              << fmt17(problems::error_h1<D>(r.cloud, r.flux, prob.grad_exact, prob.mu))
              << "\n";
  }
  std::cout << "wrote " << cfg.out << ".csv " << cfg.out << ".vtk\n";
  return 0;
}

template <int D>
int convergence_impl(const RunConfig& cfg) {
  if (cfg.resolutions.size() < 3) throw ConfigError("config: need >= 3 resolutions");
  const problems::Problem<D> prob = make_problem<D>(cfg);
  const driver::RunOptions opt = config::to_run_options(cfg);
  const auto report = driver::run_convergence<D>(prob, cfg.resolutions, opt);

  problems::ConvergenceReport collocated;
  const bool compare = cfg.compare_collocated && cfg.scheme != "collocated";
  if (compare) {
    driver::RunOptions copt = opt;
    copt.scheme = driver::Scheme::Collocated;
    collocated = driver::run_convergence<D>(prob, cfg.resolutions, copt);
  }
  io::save_convergence_csv(report, cfg.out + "_convergence.csv",
                           compare ? &collocated : nullptr);

  for (const auto& row : report.rows)
    std::cout << "N=" << row.resolution << " h=" << fmt17(row.h) << " e_l2=" << fmt17(row.e_l2)
              << " e_h1=" << fmt17(row.e_h1) << "\n";
  std::cout << "rate_l2=" << fmt17(report.rate_l2) << " rate_h1=" << fmt17(report.rate_h1)
            << "\n";
  if (compare)
    std::cout << "collocated rate_l2=" << fmt17(collocated.rate_l2)
              << " rate_h1=" << fmt17(collocated.rate_h1) << "\n";
  std::cout << "wrote " << cfg.out << "_convergence.csv\n";
  return 0;
}

template <int D>
int probe_impl(const RunConfig& cfg) {
  if constexpr (D == 3) {
    throw ConfigError("config: probe supports two-dimensional problems");
  } else {
    const problems::Problem<2> prob = make_problem<2>(cfg);
    const double dx = config::resolve_dx(cfg, prob.domain.extent());
    const driver::RunOptions opt = options_for_dx<2>(cfg, dx);
    const driver::SolveResult<2> r = driver::solve_problem<2>(prob, dx, opt);

    const int axis = (cfg.probe_axis == "x") ? 0 : 1;
    const auto field = (cfg.probe_field == "gradient") ? driver::ProbeField::Gradient
                                                       : driver::ProbeField::Flux;
    const auto samples = driver::probe_line<2>(r, axis, cfg.probe_value, 0.5 * dx, field);

    const std::string path = cfg.out + "_probe.csv";
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << (axis == 0 ? "y" : "x") << ",ux,uy\n";
    for (const auto& s : samples)
      out << fmt17(s.t) << "," << fmt17(s.value[0]) << "," << fmt17(s.value[1]) << "\n";
    std::cout << "samples=" << samples.size() << " residual=" << fmt17(r.report.rel_residual)
              << "\nwrote " << path << "\n";
    return 0;
  }
}

template <int (*Fn2)(const RunConfig&), int (*Fn3)(const RunConfig&)>
int dispatch(const RunConfig& cfg) {
  config::validate(cfg);
  return config::problem_dimension(cfg.problem) == 2 ? Fn2(cfg) : Fn3(cfg);
}

}  // namespace

int cmd_generate(const RunConfig& cfg) {
  return dispatch<generate_impl<2>, generate_impl<3>>(cfg);
}
int cmd_solve(const RunConfig& cfg) { return dispatch<solve_impl<2>, solve_impl<3>>(cfg); }
int cmd_convergence(const RunConfig& cfg) {
  return dispatch<convergence_impl<2>, convergence_impl<3>>(cfg);
}
int cmd_probe(const RunConfig& cfg) { return dispatch<probe_impl<2>, probe_impl<3>>(cfg); }

}  // namespace stagmls::commands
