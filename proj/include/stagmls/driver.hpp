#pragma once

// End-to-end runs: discretize, build stencils, assemble, solve, reconstruct
// the flux. Shared by the CLI, the tests, and the convergence studies.

#include "stagmls/core.hpp"
#include "stagmls/geometry.hpp"
#include "stagmls/gmls.hpp"
#include "stagmls/problems.hpp"
#include "stagmls/system.hpp"

#include <optional>
#include <span>
#include <vector>

namespace stagmls::driver {

using geometry::PointCloud;
using geometry::PointKind;

enum class Scheme { Staggered, Collocated };
enum class NullSpaceStrategy { PinFirstBoundary, MeanZero };

struct RunOptions {
  gmls::StencilOptions stencil;
  system::SolverConfig solver;
  Scheme scheme = Scheme::Staggered;
  double eta_factor = 0.1;  // eta = eta_factor * dx
  std::uint64_t seed = 0;
  std::optional<PointKind> bc;  // overrides the problem default when set
  NullSpaceStrategy null_space = NullSpaceStrategy::PinFirstBoundary;
};

template <int D>
struct SolveResult {
  PointCloud<D> cloud;
  Eigen::VectorXd phi;
  std::vector<Vec<D>> flux;  // physical flux -mu grad(phi); NaN without a stencil
  std::vector<double> mu_at_points;
  std::vector<double> g_at_points;
  gmls::PointStencils<D> stencils;
  system::SolveReport report;
};

template <int D>
SolveResult<D> solve_problem(const problems::Problem<D>& prob, double dx,
                             const RunOptions& opt);

template <int D>
problems::ConvergenceReport run_convergence(const problems::Problem<D>& prob,
                                            std::span<const int> resolutions,
                                            const RunOptions& opt);

template <int D>
struct ProbeSample {
  double t = 0.0;  // free coordinate along the probe line
  Vec<D> position = Vec<D>::Zero();
  Vec<D> value = Vec<D>::Zero();
};

enum class ProbeField { Flux, Gradient };

/// Flux (or gradient) at the points within `band` of the line axis = value,
/// sorted by the free coordinate.
template <int D>
std::vector<ProbeSample<D>> probe_line(const SolveResult<D>& result, int axis, double value,
                                       double band, ProbeField field);

extern template SolveResult<2> solve_problem<2>(const problems::Problem<2>&, double,
                                                const RunOptions&);
extern template SolveResult<3> solve_problem<3>(const problems::Problem<3>&, double,
                                                const RunOptions&);
extern template problems::ConvergenceReport run_convergence<2>(const problems::Problem<2>&,
                                                               std::span<const int>,
                                                               const RunOptions&);
extern template problems::ConvergenceReport run_convergence<3>(const problems::Problem<3>&,
                                                               std::span<const int>,
                                                               const RunOptions&);
extern template std::vector<ProbeSample<2>> probe_line<2>(const SolveResult<2>&, int, double,
                                                          double, ProbeField);
extern template std::vector<ProbeSample<3>> probe_line<3>(const SolveResult<3>&, int, double,
                                                          double, ProbeField);

}  // namespace stagmls::driver
