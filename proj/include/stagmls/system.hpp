#pragma once

// Global assembly of the stencil rows into a sparse system, direct and
// Krylov solves, and pure-Neumann null-space handling.

#include "stagmls/core.hpp"
#include "stagmls/geometry.hpp"
#include "stagmls/gmls.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <chrono>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stagmls::system {

using geometry::PointCloud;
using geometry::PointKind;
using gmls::FluxRow;
using gmls::OperatorRow;

struct SolveReport {
  std::string solver;
  int iterations = 0;
  double rel_residual = 0.0;
  double seconds = 0.0;
};

enum class SolverMethod { DirectLU, IterativeKrylov };

struct SolverConfig {
  SolverMethod method = SolverMethod::DirectLU;
  double tol = 1e-10;
  int max_iterations = 5000;
  int restart = 50;
};

struct Assembled {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  std::vector<PointKind> row_kind;
  bool mean_zero = false;  // bordered by a zero-mean multiplier row/column

  int unknowns() const { return static_cast<int>(row_kind.size()); }
};

/// Assembles rows given per-point right-hand-side values for the non-Dirichlet
/// equations. Known Dirichlet neighbor values move to the right-hand side.
template <int D>
Assembled assemble_rows(const PointCloud<D>& cloud,
                        const std::vector<std::optional<OperatorRow<D>>>& rows,
                        std::span<const double> rhs_values,
                        const std::function<double(const Vec<D>&)>& dirichlet_value) {
  const int n = cloud.size();
  if (static_cast<int>(rows.size()) != n)
    throw Error("assemble: stencil count does not match point count");

  Assembled sys;
  sys.row_kind = cloud.kind;
  sys.rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 16);

  for (int i = 0; i < n; ++i) {
    if (cloud.kind[i] == PointKind::DirichletBoundary) {
      trip.emplace_back(i, i, 1.0);
      sys.rhs[i] = dirichlet_value(cloud.positions[i]);
      continue;
    }
    if (!rows[i])
      throw Error("assemble: missing stencil at point " + std::to_string(i));
    const OperatorRow<D>& row = *rows[i];
    trip.emplace_back(i, i, row.diag);
    double rhs = rhs_values[i];
    for (std::size_t k = 0; k < row.neighbors.size(); ++k) {
      const int j = row.neighbors[k];
      if (cloud.kind[j] == PointKind::DirichletBoundary) {
        rhs -= row.beta[k] * dirichlet_value(cloud.positions[j]);
      } else {
        trip.emplace_back(i, j, row.beta[k]);
      }
    }
    sys.rhs[i] = rhs;
  }

  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.matrix.makeCompressed();
  return sys;
}

/// Assembles the discretization of div(mu grad) phi = -f with the stated data:
/// interior rows keep -f on the right, Neumann rows additionally move
/// gamma_i g_i across, Dirichlet rows are identity rows with value u.
template <int D>
Assembled assemble(const PointCloud<D>& cloud,
                   const std::vector<std::optional<OperatorRow<D>>>& rows,
                   const std::function<double(const Vec<D>&)>& f,
                   const std::function<double(const Vec<D>&)>& u,
                   const std::function<double(const Vec<D>&, const Vec<D>&)>& g) {
  const int n = cloud.size();
  std::vector<double> rhs(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (cloud.kind[i] == PointKind::DirichletBoundary) continue;
    rhs[i] = -f(cloud.positions[i]);
    if (cloud.kind[i] == PointKind::NeumannBoundary) {
      if (!rows[i]) throw Error("assemble: missing stencil at point " + std::to_string(i));
      rhs[i] -= rows[i]->rhs_coeff * g(cloud.positions[i], cloud.normals[i]);
    }
  }
  return assemble_rows<D>(cloud, rows, rhs, u);
}

struct PinPoint {
  int index = 0;
  double value = 0.0;
};

struct MeanZero {};

/// Pure-Neumann null-space handling. PinPoint replaces one row with an
/// identity row; MeanZero borders the system with a mean-value multiplier so
/// the solution component in the constant kernel is zero.
inline Assembled fix_null_space(const Assembled& sys, const PinPoint& pin) {
  for (PointKind k : sys.row_kind)
    if (k == PointKind::DirichletBoundary)
      throw Error("fix_null_space: system has Dirichlet rows");
  const int n = sys.unknowns();
  if (pin.index < 0 || pin.index >= n) throw Error("fix_null_space: pin index out of range");

  Assembled out;
  out.row_kind = sys.row_kind;
  out.rhs = sys.rhs;
  out.rhs[pin.index] = pin.value;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(sys.matrix.nonZeros() + 1);
  for (int c = 0; c < sys.matrix.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, c); it; ++it)
      if (it.row() != pin.index) trip.emplace_back(it.row(), it.col(), it.value());
  trip.emplace_back(pin.index, pin.index, 1.0);
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  out.matrix.makeCompressed();
  return out;
}

inline Assembled fix_null_space(const Assembled& sys, const MeanZero&) {
  for (PointKind k : sys.row_kind)
    if (k == PointKind::DirichletBoundary)
      throw Error("fix_null_space: system has Dirichlet rows");
  const int n = sys.unknowns();
  Assembled out;
  out.row_kind = sys.row_kind;
  out.mean_zero = true;
  out.rhs = Eigen::VectorXd::Zero(n + 1);
  out.rhs.head(n) = sys.rhs;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(sys.matrix.nonZeros() + 2 * n);
  for (int c = 0; c < sys.matrix.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, c); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, n, 1.0);
    trip.emplace_back(n, i, 1.0);
  }
  out.matrix.resize(n + 1, n + 1);
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  out.matrix.makeCompressed();
  return out;
}

inline std::pair<Eigen::VectorXd, SolveReport> solve(const Assembled& sys,
                                                     const SolverConfig& cfg = {}) {
  if (sys.matrix.rows() != sys.matrix.cols()) throw SolveError("solve: system is not square");
  const auto t0 = std::chrono::steady_clock::now();
  Eigen::VectorXd x;
  SolveReport report;

  if (cfg.method == SolverMethod::DirectLU) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success) throw SolveError("direct solve failed: singular factorization");
    x = lu.solve(sys.rhs);
    report.solver = "direct-lu";
    report.iterations = 1;
  } else {
    Eigen::GMRES<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> gmres;
    gmres.setTolerance(cfg.tol);
    gmres.setMaxIterations(cfg.max_iterations);
    gmres.set_restart(cfg.restart);
    gmres.compute(sys.matrix);
    x = gmres.solve(sys.rhs);
    report.solver = "gmres";
    report.iterations = static_cast<int>(gmres.iterations());
    if (gmres.info() != Eigen::Success)
      throw SolveError("gmres did not converge: residual " + fmt17(gmres.error()) + " after " +
                       std::to_string(gmres.iterations()) + " iterations");
  }

  const double bnorm = sys.rhs.norm();
  const double res = (sys.matrix * x - sys.rhs).norm();
  report.rel_residual = bnorm > 0.0 ? res / bnorm : res;
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (sys.mean_zero) x.conservativeResize(x.size() - 1);
  return {std::move(x), report};
}

/// Physical flux u = -(reconstructed mu grad phi) at every point carrying a
/// flux row; NaN elsewhere. `g_at_points` supplies the Neumann data entering
/// constrained reconstructions (empty means zero).
template <int D>
std::vector<Vec<D>> reconstruct_flux(const PointCloud<D>& cloud,
                                     const std::vector<std::optional<FluxRow<D>>>& flux_rows,
                                     const Eigen::VectorXd& solution,
                                     std::span<const double> g_at_points = {}) {
  const int n = cloud.size();
  std::vector<Vec<D>> out(n, Vec<D>::Constant(std::numeric_limits<double>::quiet_NaN()));
  std::vector<double> vals;
  for (int i = 0; i < n; ++i) {
    if (!flux_rows[i]) continue;
    const FluxRow<D>& fr = *flux_rows[i];
    vals.resize(fr.neighbors.size());
    for (std::size_t k = 0; k < fr.neighbors.size(); ++k) vals[k] = solution[fr.neighbors[k]];
    const double g = g_at_points.empty() ? 0.0 : g_at_points[i];
    out[i] = -fr.apply(solution[i], vals, g);
  }
  return out;
}

}  // namespace stagmls::system
