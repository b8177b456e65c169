#include "stagmls/driver.hpp"

#include <algorithm>
#include <cmath>

namespace stagmls::driver {

namespace {

/// Combines the collocated Laplacian and gradient stencils into rows for
/// div(mu grad) via the product rule mu_i * lap + grad(mu)_i . grad; Neumann
/// points carry the collocated boundary equation mu_i n . grad(phi) = g.
template <int D>
void collocated_rows(const PointCloud<D>& cloud, gmls::PointStencils<D>& st,
                     std::span<const double> mu, const problems::Problem<D>& prob,
                     std::vector<double>& rhs_values) {
  const int n = cloud.size();
  rhs_values.assign(n, 0.0);
  std::vector<double> mu_nb;
  for (int i = 0; i < n; ++i) {
    if (cloud.kind[i] == PointKind::DirichletBoundary) continue;
    if (!st.rows[i] || !st.flux[i])
      throw Error("collocated assembly: missing stencil at point " + std::to_string(i));
    gmls::OperatorRow<D>& row = *st.rows[i];
    const gmls::FluxRow<D>& grad = *st.flux[i];

    if (cloud.kind[i] == PointKind::Interior) {
      mu_nb.resize(row.neighbors.size());
      for (std::size_t k = 0; k < row.neighbors.size(); ++k)
        mu_nb[k] = mu[row.neighbors[k]];
      const Vec<D> grad_mu = grad.apply(mu[i], mu_nb);
      double sum = 0.0;
      for (std::size_t k = 0; k < row.beta.size(); ++k) {
        row.beta[k] = mu[i] * row.beta[k] + grad_mu.dot(grad.coeff.col(static_cast<int>(k)));
        sum += row.beta[k];
      }
      row.diag = -sum;
      rhs_values[i] = -prob.source(cloud.positions[i]);
    } else {
      const Vec<D>& nrm = cloud.normals[i];
      double sum = 0.0;
      for (std::size_t k = 0; k < row.beta.size(); ++k) {
        row.beta[k] = mu[i] * nrm.dot(grad.coeff.col(static_cast<int>(k)));
        sum += row.beta[k];
      }
      row.diag = -sum;
      row.rhs_coeff = 0.0;
      rhs_values[i] = prob.neumann(cloud.positions[i], nrm);
    }
  }
}

}  // namespace

template <int D>
SolveResult<D> solve_problem(const problems::Problem<D>& prob, double dx,
                             const RunOptions& opt) {
  const PointKind bc = opt.bc.value_or(prob.default_bc);
  geometry::BcAssignment<D> assign = [bc](const Vec<D>&, const Vec<D>&) { return bc; };

  SolveResult<D> result;
  result.cloud = geometry::discretize(prob.domain, dx, opt.eta_factor * dx, opt.seed, assign);
  const PointCloud<D>& cloud = result.cloud;
  const int n = cloud.size();

  const double eps0 = (opt.stencil.epsilon_multiplier > 0.0)
                          ? opt.stencil.epsilon_multiplier * dx
                          : neighbors::select_epsilon(opt.stencil.m, D, dx, opt.stencil.safety);
  const auto index = neighbors::build_index(cloud, std::max(eps0, dx));

  result.mu_at_points.resize(n);
  for (int i = 0; i < n; ++i) result.mu_at_points[i] = prob.mu(cloud.positions[i]);

  result.g_at_points.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (cloud.kind[i] == PointKind::NeumannBoundary)
      result.g_at_points[i] = prob.neumann(cloud.positions[i], cloud.normals[i]);

  gmls::StencilOptions sopt = opt.stencil;
  sopt.collocated = (opt.scheme == Scheme::Collocated);
  result.stencils = gmls::build_stencils<D>(cloud, index, result.mu_at_points, sopt);

  system::Assembled sys;
  if (opt.scheme == Scheme::Staggered) {
    sys = system::assemble<D>(cloud, result.stencils.rows, prob.source, prob.dirichlet,
                              prob.neumann);
  } else {
    std::vector<double> rhs_values;
    collocated_rows<D>(cloud, result.stencils, result.mu_at_points, prob, rhs_values);
    sys = system::assemble_rows<D>(cloud, result.stencils.rows, rhs_values, prob.dirichlet);
  }

  const bool pure_neumann = cloud.count(PointKind::DirichletBoundary) == 0;
  if (pure_neumann) {
    if (opt.null_space == NullSpaceStrategy::MeanZero) {
      sys = system::fix_null_space(sys, system::MeanZero{});
    } else {
      int pin = 0;
      while (pin < n && cloud.kind[pin] == PointKind::Interior) ++pin;
      if (pin == n) throw Error("solve_problem: no boundary point to pin");
      const double value = prob.phi_exact ? prob.phi_exact(cloud.positions[pin]) : 0.0;
      sys = system::fix_null_space(sys, system::PinPoint{pin, value});
    }
  }

  auto [phi, report] = system::solve(sys, opt.solver);
  result.phi = std::move(phi);
  result.report = report;

  result.flux = system::reconstruct_flux<D>(cloud, result.stencils.flux, result.phi,
                                            result.g_at_points);
  if (opt.scheme == Scheme::Collocated) {
    // collocated flux rows reconstruct grad(phi); scale by the nodal mu
    for (int i = 0; i < n; ++i) result.flux[i] *= result.mu_at_points[i];
  }
  return result;
}

template <int D>
problems::ConvergenceReport run_convergence(const problems::Problem<D>& prob,
                                            std::span<const int> resolutions,
                                            const RunOptions& opt) {
  if (resolutions.size() < 3) throw Error("convergence: need >= 3 resolutions");
  if (!prob.has_exact())
    throw Error("convergence: problem '" + prob.name + "' has no exact solution");

  problems::ConvergenceReport report;
  for (int res : resolutions) {
    if (res < 2) throw Error("convergence: resolution must be >= 2");
    const double dx = prob.domain.extent() / res;
    problems::ConvergenceRow row;
    row.resolution = res;
    row.h = dx;
    try {
      SolveResult<D> r = solve_problem<D>(prob, dx, opt);
      row.points = r.cloud.size();
      row.e_l2 = problems::error_l2<D>(r.cloud, r.phi, prob.phi_exact);
      row.e_h1 = problems::error_h1<D>(r.cloud, r.flux, prob.grad_exact, prob.mu);
      row.solve = r.report;
    } catch (const Error& e) {
      throw Error("convergence: N=" + std::to_string(res) + " failed: " + e.what());
    }
    report.rows.push_back(row);
  }
  report.fit();
  return report;
}

template <int D>
std::vector<ProbeSample<D>> probe_line(const SolveResult<D>& result, int axis, double value,
                                       double band, ProbeField field) {
  if (axis < 0 || axis >= D) throw Error("probe: axis out of range");
  const PointCloud<D>& cloud = result.cloud;
  const int free_axis = (axis == 0) ? 1 : 0;
  std::vector<ProbeSample<D>> samples;
  for (int i = 0; i < cloud.size(); ++i) {
    if (std::abs(cloud.positions[i][axis] - value) > band) continue;
    if (!result.flux[i].allFinite()) continue;
    ProbeSample<D> s;
    s.t = cloud.positions[i][free_axis];
    s.position = cloud.positions[i];
    s.value = (field == ProbeField::Flux)
                  ? result.flux[i]
                  : Vec<D>(-result.flux[i] / result.mu_at_points[i]);
    samples.push_back(s);
  }
  if (samples.empty()) throw Error("probe: no points within the band");
  std::sort(samples.begin(), samples.end(),
            [](const ProbeSample<D>& a, const ProbeSample<D>& b) { return a.t < b.t; });
  return samples;
}

template SolveResult<2> solve_problem<2>(const problems::Problem<2>&, double,
                                         const RunOptions&);
template SolveResult<3> solve_problem<3>(const problems::Problem<3>&, double,
                                         const RunOptions&);
template problems::ConvergenceReport run_convergence<2>(const problems::Problem<2>&,
                                                        std::span<const int>,
                                                        const RunOptions&);
template problems::ConvergenceReport run_convergence<3>(const problems::Problem<3>&,
                                                        std::span<const int>,
                                                        const RunOptions&);
template std::vector<ProbeSample<2>> probe_line<2>(const SolveResult<2>&, int, double, double,
                                                   ProbeField);
template std::vector<ProbeSample<3>> probe_line<3>(const SolveResult<3>&, int, double, double,
                                                   ProbeField);

}  // namespace stagmls::driver
