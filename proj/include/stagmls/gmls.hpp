#pragma once

// Local weighted least-squares stencils. The staggered operator fits a
// polynomial (vanishing at the center) to edge differences sampled at the
// neighborhood midpoints and reads the Laplacian/gradient of the fit at the
// center; the collocated variant fits point values directly.

#include "stagmls/basis.hpp"
#include "stagmls/core.hpp"
#include "stagmls/neighbors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stagmls::gmls {

using basis::TaylorBasis;
using geometry::PointCloud;
using geometry::PointKind;
using neighbors::Neighborhood;
using neighbors::SpatialIndex;
using neighbors::WeightKernel;

/// u_ij = phi_j - phi_i on every edge of the stencil; connectivity only.
inline std::vector<double> topological_gradient(double phi_center,
                                                std::span<const double> phi_neighbors) {
  std::vector<double> u(phi_neighbors.size());
  for (std::size_t k = 0; k < phi_neighbors.size(); ++k) u[k] = phi_neighbors[k] - phi_center;
  return u;
}

/// One assembled row of the discrete div(mu grad) operator. The row acts on
/// differences phi_j - phi_i, so constants are annihilated exactly.
template <int D>
struct OperatorRow {
  int center = -1;
  std::vector<int> neighbors;
  std::vector<double> beta;   // per-neighbor coefficients, mu absorbed
  double diag = 0.0;          // -sum(beta)
  double rhs_coeff = 0.0;     // gamma_i, nonzero only on Neumann rows
  double cond = 0.0;          // Gram condition estimate from the LU pivots
  double epsilon = 0.0;

  double apply(double phi_center, std::span<const double> phi_neighbors, double g = 0.0) const {
    double v = rhs_coeff * g;
    for (std::size_t k = 0; k < beta.size(); ++k)
      v += beta[k] * (phi_neighbors[k] - phi_center);
    return v;
  }
};

/// Reconstruction of mu grad(phi) at the stencil center from the same edge
/// differences. The physical flux is the negation of apply().
template <int D>
struct FluxRow {
  int center = -1;
  std::vector<int> neighbors;
  Eigen::Matrix<double, D, Eigen::Dynamic> coeff;  // one column per neighbor
  Vec<D> g_coeff = Vec<D>::Zero();                 // Neumann datum contribution

  Vec<D> apply(double phi_center, std::span<const double> phi_neighbors, double g = 0.0) const {
    Vec<D> v = g_coeff * g;
    for (int k = 0; k < coeff.cols(); ++k)
      v += coeff.col(k) * (phi_neighbors[k] - phi_center);
    return v;
  }
};

template <int D>
struct StencilPair {
  OperatorRow<D> row;
  FluxRow<D> flux;
};

namespace detail {

/// max |pivot| / min |pivot| of a partial-pivoting LU; cheap condition proxy.
inline double pivot_condition(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
  const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
  const double lo = d.minCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return d.maxCoeff() / lo;
}

template <int D>
Eigen::MatrixXd basis_at_sites(const TaylorBasis<D>& basis, std::span<const Vec<D>> sites) {
  Eigen::MatrixXd P(basis.size(), static_cast<int>(sites.size()));
  Eigen::VectorXd col(basis.size());
  for (std::size_t j = 0; j < sites.size(); ++j) {
    basis.eval_row(sites[j], col.data());
    P.col(static_cast<int>(j)) = col;
  }
  return P;
}

}  // namespace detail

/// Staggered stencil at an unconstrained point. `mu_edge` holds the edge
/// coefficients mu_ij aligned with nb.neighbors.
template <int D>
StencilPair<D> staggered_stencil(const Neighborhood<D>& nb, const TaylorBasis<D>& basis,
                                 std::span<const double> mu_edge, double cond_limit = 1e12) {
  const int n = nb.size();
  const int q = basis.size();
  if (n < q)
    throw StencilError(nb.center, "stencil deficient at point " + std::to_string(nb.center) +
                                      ": " + std::to_string(n) + " midpoints, need >= " +
                                      std::to_string(q));

  const Eigen::MatrixXd P = detail::basis_at_sites<D>(basis, nb.midpoints);
  const Eigen::Map<const Eigen::VectorXd> w(nb.weights.data(), n);
  const Eigen::MatrixXd gram = P * w.asDiagonal() * P.transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(gram);
  const double cond = detail::pivot_condition(lu);
  if (!(cond < cond_limit))
    throw StencilError(nb.center, "ill-conditioned Gram matrix at point " +
                                      std::to_string(nb.center) + " (cond ~ " +
                                      std::to_string(cond) + ")");

  Eigen::MatrixXd targets(q, 1 + D);
  targets.col(0) = basis.laplacian_at_center();
  targets.rightCols(D) = basis.gradient_at_center();
  // per-sample coefficients S * targets with S = W P^T Gram^{-1}
  const Eigen::MatrixXd C = w.asDiagonal() * (P.transpose() * lu.solve(targets));

  StencilPair<D> out;
  out.row.center = nb.center;
  out.row.neighbors = nb.neighbors;
  out.row.cond = cond;
  out.row.epsilon = nb.epsilon;
  out.row.beta.resize(n);
  out.flux.center = nb.center;
  out.flux.neighbors = nb.neighbors;
  out.flux.coeff.resize(D, n);
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    out.row.beta[j] = 0.25 * mu_edge[j] * C(j, 0);
    sum += out.row.beta[j];
    out.flux.coeff.col(j) = 0.5 * mu_edge[j] * C.row(j).tail(D).transpose();
  }
  out.row.diag = -sum;
  return out;
}

/// Staggered stencil at a Neumann boundary point: the least-squares fit is
/// constrained by d/dn p(center) = 2 g, solved through the bordered KKT system.
/// The g dependence lands in rhs_coeff / g_coeff.
template <int D>
StencilPair<D> staggered_stencil_neumann(const Neighborhood<D>& nb, const TaylorBasis<D>& basis,
                                         std::span<const double> mu_edge, const Vec<D>& normal,
                                         double cond_limit = 1e12) {
  const int n = nb.size();
  const int q = basis.size();
  if (n < q)
    throw StencilError(nb.center, "stencil deficient at point " + std::to_string(nb.center) +
                                      ": " + std::to_string(n) + " midpoints, need >= " +
                                      std::to_string(q));

  const Eigen::VectorXd constraint = basis.normal_derivative_at_center(normal);
  if (constraint.norm() == 0.0)
    throw StencilError(nb.center, "degenerate Neumann constraint at point " +
                                      std::to_string(nb.center));

  const Eigen::MatrixXd P = detail::basis_at_sites<D>(basis, nb.midpoints);
  const Eigen::Map<const Eigen::VectorXd> w(nb.weights.data(), n);

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(q + 1, q + 1);
  K.topLeftCorner(q, q) = P * w.asDiagonal() * P.transpose();
  K.topRightCorner(q, 1) = constraint;
  K.bottomLeftCorner(1, q) = constraint.transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  const double cond = detail::pivot_condition(lu);
  if (!(cond < cond_limit))
    throw StencilError(nb.center, "singular constrained system at point " +
                                      std::to_string(nb.center) + " (cond ~ " +
                                      std::to_string(cond) + ")");

  Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(q + 1, 1 + D);
  targets.col(0).head(q) = basis.laplacian_at_center();
  targets.rightCols(D).topRows(q) = basis.gradient_at_center();
  const Eigen::MatrixXd T = lu.solve(targets);
  const Eigen::MatrixXd C = w.asDiagonal() * (P.transpose() * T.topRows(q));

  StencilPair<D> out;
  out.row.center = nb.center;
  out.row.neighbors = nb.neighbors;
  out.row.cond = cond;
  out.row.epsilon = nb.epsilon;
  out.row.beta.resize(n);
  out.flux.center = nb.center;
  out.flux.neighbors = nb.neighbors;
  out.flux.coeff.resize(D, n);
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    out.row.beta[j] = 0.25 * mu_edge[j] * C(j, 0);
    sum += out.row.beta[j];
    out.flux.coeff.col(j) = 0.5 * mu_edge[j] * C.row(j).tail(D).transpose();
  }
  out.row.diag = -sum;
  // multiplier block of K^{-1}: operator picks up (1/4)*(2 g)*sigma, flux (1/2)*(2 g)*sigma_G
  out.row.rhs_coeff = 0.5 * T(q, 0);
  out.flux.g_coeff = T.row(q).tail(D).transpose();
  return out;
}

/// Collocated stencil: standard GMLS fit of point values (center included,
/// constant in the basis). Returns the Laplacian row and the gradient
/// reconstruction, both recast onto differences.
template <int D>
StencilPair<D> collocated_stencil(const Neighborhood<D>& nb, const PointCloud<D>& cloud,
                                  const WeightKernel& kernel, const TaylorBasis<D>& basis,
                                  double cond_limit = 1e12) {
  const int n = nb.size();
  const int q = basis.size();
  if (n + 1 < q)
    throw StencilError(nb.center, "stencil deficient at point " + std::to_string(nb.center) +
                                      ": " + std::to_string(n + 1) + " samples, need >= " +
                                      std::to_string(q));

  std::vector<Vec<D>> sites(n + 1);
  Eigen::VectorXd w(n + 1);
  sites[0] = cloud.positions[nb.center];
  w[0] = kernel(0.0);
  for (int j = 0; j < n; ++j) {
    sites[j + 1] = cloud.positions[nb.neighbors[j]];
    w[j + 1] = kernel((sites[j + 1] - sites[0]).norm());
  }

  const Eigen::MatrixXd P = detail::basis_at_sites<D>(basis, sites);
  const Eigen::MatrixXd gram = P * w.asDiagonal() * P.transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(gram);
  const double cond = detail::pivot_condition(lu);
  if (!(cond < cond_limit))
    throw StencilError(nb.center, "ill-conditioned Gram matrix at point " +
                                      std::to_string(nb.center) + " (cond ~ " +
                                      std::to_string(cond) + ")");

  Eigen::MatrixXd targets(q, 1 + D);
  targets.col(0) = basis.laplacian_at_center();
  targets.rightCols(D) = basis.gradient_at_center();
  const Eigen::MatrixXd C = w.asDiagonal() * (P.transpose() * lu.solve(targets));

  StencilPair<D> out;
  out.row.center = nb.center;
  out.row.neighbors = nb.neighbors;
  out.row.cond = cond;
  out.row.epsilon = nb.epsilon;
  out.row.beta.resize(n);
  out.flux.center = nb.center;
  out.flux.neighbors = nb.neighbors;
  out.flux.coeff.resize(D, n);
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    out.row.beta[j] = C(j + 1, 0);
    sum += out.row.beta[j];
    out.flux.coeff.col(j) = C.row(j + 1).tail(D).transpose();
  }
  out.row.diag = -sum;
  return out;
}

template <int D>
struct DirectionalFit {
  double div;   // divergence of the sampled field at the center
  Vec<D> vec;   // reconstructed field value at the center
};

/// Fits the radial-component samples u_ij = u(x_ij) . 2 m_ij and returns
/// (Laplacian/4, gradient/2) of the fit at the center.
template <int D>
DirectionalFit<D> gmls_divergence_from_directional_samples(const Neighborhood<D>& nb,
                                                           const TaylorBasis<D>& basis,
                                                           std::span<const double> samples,
                                                           double cond_limit = 1e12) {
  std::vector<double> ones(nb.size(), 1.0);
  const StencilPair<D> st = staggered_stencil<D>(nb, basis, ones, cond_limit);
  DirectionalFit<D> out;
  out.div = 0.0;
  out.vec = Vec<D>::Zero();
  for (int j = 0; j < nb.size(); ++j) {
    out.div += st.row.beta[j] * samples[j];
    out.vec += st.flux.coeff.col(j) * samples[j];
  }
  return out;
}

enum class MuEdgeRule { Arithmetic, Harmonic };

struct StencilOptions {
  int m = 2;
  double epsilon_multiplier = 0.0;  // 0 selects the tuned default for (m, D)
  double safety = 1.0;
  neighbors::KernelFamily kernel = neighbors::KernelFamily::WendlandC2;
  int trunc_power = 4;
  double cond_limit = 1e12;
  int max_retries = 3;      // epsilon growth attempts on deficiency/ill-conditioning
  double growth = 1.25;
  MuEdgeRule mu_rule = MuEdgeRule::Arithmetic;
  bool flux_at_dirichlet = true;
  bool collocated = false;
};

template <int D>
struct PointStencils {
  std::vector<std::optional<OperatorRow<D>>> rows;
  std::vector<std::optional<FluxRow<D>>> flux;
};

namespace detail {

inline WeightKernel make_kernel(const StencilOptions& opt, double eps) {
  if (opt.kernel == neighbors::KernelFamily::WendlandC2)
    return WeightKernel::wendland_c2(eps);
  return WeightKernel::truncated_power(eps, opt.trunc_power);
}

inline double edge_mu(double mi, double mj, MuEdgeRule rule) {
  if (rule == MuEdgeRule::Harmonic) return 2.0 * mi * mj / (mi + mj);
  return 0.5 * (mi + mj);
}

}  // namespace detail

/// Builds stencils for every point that needs one. Construction is
/// per-point independent and runs in parallel; on deficiency or an
/// ill-conditioned local system the support radius is enlarged and the
/// neighborhood rebuilt, up to max_retries times.
template <int D>
PointStencils<D> build_stencils(const PointCloud<D>& cloud, const SpatialIndex<D>& index,
                                std::span<const double> mu_at_points,
                                const StencilOptions& opt) {
  const int n = cloud.size();
  PointStencils<D> out;
  out.rows.resize(n);
  out.flux.resize(n);

  const double eps0 = (opt.epsilon_multiplier > 0.0)
                          ? opt.epsilon_multiplier * cloud.h
                          : neighbors::select_epsilon(opt.m, D, cloud.h, opt.safety);

  std::vector<std::string> failures(n);
  parallel_for(n, [&](int i) {
    const PointKind kind = cloud.kind[i];
    if (kind == PointKind::DirichletBoundary && !opt.flux_at_dirichlet) return;

    std::string last_error;
    for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
      const double eps = eps0 * std::pow(opt.growth, attempt);
      try {
        const WeightKernel kernel = detail::make_kernel(opt, eps);
        const TaylorBasis<D> tb(cloud.positions[i], eps, opt.m, opt.collocated);
        const int floor = opt.collocated ? tb.size() - 1 : tb.size();
        const Neighborhood<D> nb =
            neighbors::build_neighborhood(index, cloud, i, eps, kernel, floor);

        std::vector<double> mu_edge(nb.size());
        for (int j = 0; j < nb.size(); ++j)
          mu_edge[j] = detail::edge_mu(mu_at_points[i], mu_at_points[nb.neighbors[j]],
                                       opt.mu_rule);

        StencilPair<D> st;
        if (opt.collocated) {
          st = collocated_stencil<D>(nb, cloud, kernel, tb, opt.cond_limit);
        } else if (kind == PointKind::NeumannBoundary) {
          st = staggered_stencil_neumann<D>(nb, tb, mu_edge, cloud.normals[i],
                                            opt.cond_limit);
        } else {
          st = staggered_stencil<D>(nb, tb, mu_edge, opt.cond_limit);
        }
        if (kind != PointKind::DirichletBoundary) out.rows[i] = std::move(st.row);
        out.flux[i] = std::move(st.flux);
        return;
      } catch (const StencilError& e) {
        last_error = e.what();
      }
    }
    failures[i] = last_error;
  });

  for (int i = 0; i < n; ++i)
    if (!failures[i].empty()) throw StencilError(i, failures[i]);
  return out;
}

}  // namespace stagmls::gmls
