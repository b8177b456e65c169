#pragma once

// File formats: point-cloud CSV (decimal round-trip safe), solution field
// CSV, legacy-VTK polydata, MatrixMarket, and diagnostic dumps.

#include "stagmls/core.hpp"
#include "stagmls/geometry.hpp"
#include "stagmls/gmls.hpp"
#include "stagmls/problems.hpp"

#include <Eigen/Sparse>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace stagmls::io {

using geometry::PointCloud;
using geometry::PointKind;

inline const char* kind_name(PointKind k) {
  switch (k) {
    case PointKind::Interior: return "interior";
    case PointKind::DirichletBoundary: return "dirichlet";
    case PointKind::NeumannBoundary: return "neumann";
  }
  return "interior";
}

inline PointKind kind_from_name(const std::string& s) {
  if (s == "interior") return PointKind::Interior;
  if (s == "dirichlet") return PointKind::DirichletBoundary;
  if (s == "neumann") return PointKind::NeumannBoundary;
  throw Error("unknown point kind '" + s + "'");
}

template <int D>
void save_cloud_csv(const PointCloud<D>& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "# stagmls cloud dim=" << D << " h=" << fmt17(cloud.h) << " seed=" << cloud.seed
      << "\n";
  out << (D == 2 ? "x,y,kind,nx,ny" : "x,y,z,kind,nx,ny,nz") << "\n";
  for (int i = 0; i < cloud.size(); ++i) {
    for (int d = 0; d < D; ++d) out << fmt17(cloud.positions[i][d]) << ",";
    out << kind_name(cloud.kind[i]);
    for (int d = 0; d < D; ++d) out << "," << fmt17(cloud.normals[i][d]);
    out << "\n";
  }
}

template <int D>
PointCloud<D> load_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# stagmls cloud", 0) != 0)
    throw Error("not a stagmls cloud file: " + path);

  PointCloud<D> cloud;
  {
    std::istringstream hs(line.substr(line.find("dim=")));
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("dim=", 0) == 0 && std::stoi(tok.substr(4)) != D)
        throw Error("cloud dimension mismatch in " + path);
      if (tok.rfind("h=", 0) == 0) cloud.h = std::stod(tok.substr(2));
      if (tok.rfind("seed=", 0) == 0) cloud.seed = std::stoull(tok.substr(5));
    }
  }
  std::getline(in, line);  // column header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    Vec<D> p, n;
    for (int d = 0; d < D; ++d) {
      std::getline(ls, cell, ',');
      p[d] = std::stod(cell);
    }
    std::getline(ls, cell, ',');
    const PointKind kind = kind_from_name(cell);
    for (int d = 0; d < D; ++d) {
      std::getline(ls, cell, ',');
      n[d] = std::stod(cell);
    }
    cloud.positions.push_back(p);
    cloud.kind.push_back(kind);
    cloud.normals.push_back(n);
  }
  return cloud;
}

template <int D>
void save_field_csv(const PointCloud<D>& cloud, const Eigen::VectorXd& phi,
                    const std::vector<Vec<D>>& flux, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << (D == 2 ? "x,y,phi,ux,uy" : "x,y,z,phi,ux,uy,uz") << "\n";
  for (int i = 0; i < cloud.size(); ++i) {
    for (int d = 0; d < D; ++d) out << fmt17(cloud.positions[i][d]) << ",";
    out << fmt17(phi[i]);
    for (int d = 0; d < D; ++d) out << "," << fmt17(flux[i][d]);
    out << "\n";
  }
}

/// Legacy ASCII VTK polydata with the solution as a scalar field and the
/// reconstructed flux as a vector field.
template <int D>
void save_field_vtk(const PointCloud<D>& cloud, const Eigen::VectorXd& phi,
                    const std::vector<Vec<D>>& flux, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  const int n = cloud.size();
  out << "# vtk DataFile Version 3.0\nstagmls field\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << n << " double\n";
  for (int i = 0; i < n; ++i) {
    const auto& p = cloud.positions[i];
    out << fmt17(p[0]) << " " << fmt17(p[1]) << " " << (D == 3 ? fmt17(p[2]) : "0") << "\n";
  }
  out << "VERTICES " << n << " " << 2 * n << "\n";
  for (int i = 0; i < n; ++i) out << "1 " << i << "\n";
  out << "POINT_DATA " << n << "\n";
  out << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < n; ++i) out << fmt17(phi[i]) << "\n";
  out << "VECTORS flux double\n";
  for (int i = 0; i < n; ++i) {
    const auto& u = flux[i];
    out << fmt17(u[0]) << " " << fmt17(u[1]) << " " << (D == 3 ? fmt17(u[2]) : "0") << "\n";
  }
}

inline void save_matrix_market(const Eigen::SparseMatrix<double>& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (int c = 0; c < m.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it)
      out << it.row() + 1 << " " << it.col() + 1 << " " << fmt17(it.value()) << "\n";
}

inline void save_convergence_csv(const problems::ConvergenceReport& report,
                                 const std::string& path,
                                 const problems::ConvergenceReport* collocated = nullptr) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "N,h,e_l2,e_h1,rate_l2,rate_h1";
  if (collocated) out << ",e_l2_collocated,e_h1_collocated";
  out << "\n";
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    const auto& r = report.rows[k];
    out << r.resolution << "," << fmt17(r.h) << "," << fmt17(r.e_l2) << "," << fmt17(r.e_h1)
        << ",,";
    if (collocated)
      out << "," << fmt17(collocated->rows[k].e_l2) << "," << fmt17(collocated->rows[k].e_h1);
    out << "\n";
  }
  out << "rate,,,," << fmt17(report.rate_l2) << "," << fmt17(report.rate_h1);
  if (collocated) out << "," << fmt17(collocated->rate_l2) << "," << fmt17(collocated->rate_h1);
  out << "\n";
}

template <int D>
void save_stencil_dump(const std::vector<std::optional<gmls::OperatorRow<D>>>& rows,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "i,j,beta,gamma,cond\n";
  for (const auto& row : rows) {
    if (!row) continue;
    for (std::size_t k = 0; k < row->neighbors.size(); ++k)
      out << row->center << "," << row->neighbors[k] << "," << fmt17(row->beta[k]) << ","
          << fmt17(row->rhs_coeff) << "," << fmt17(row->cond) << "\n";
  }
}

template <int D>
void save_stencil_sizes(const std::vector<std::optional<gmls::OperatorRow<D>>>& rows,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "i,neighbors,epsilon\n";
  for (const auto& row : rows)
    if (row)
      out << row->center << "," << row->neighbors.size() << "," << fmt17(row->epsilon) << "\n";
}

}  // namespace stagmls::io
