#pragma once

// Uniform-grid range search and per-point stencil data: neighbor indices,
// edge midpoints, half-edges, and midpoint-distance weights.

#include "stagmls/core.hpp"
#include "stagmls/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

namespace stagmls::neighbors {

using geometry::PointCloud;

template <int D>
class SpatialIndex {
public:
  SpatialIndex(std::vector<Vec<D>> points, double cell_size)
      : points_(std::move(points)), cell_(cell_size) {
    if (!(cell_size > 0.0)) throw Error("SpatialIndex: cell_size must be positive");
    for (int i = 0; i < static_cast<int>(points_.size()); ++i)
      cells_[pack(key(points_[i]))].push_back(i);
  }

  int size() const { return static_cast<int>(points_.size()); }
  const Vec<D>& position(int i) const { return points_[i]; }

  /// All indices j with ||x_j - center|| < radius (strict), sorted ascending.
  std::vector<int> query(const Vec<D>& center, double radius) const {
    std::vector<int> out;
    if (!(radius > 0.0)) return out;
    std::array<std::int64_t, D> lo, hi;
    for (int d = 0; d < D; ++d) {
      lo[d] = coord(center[d] - radius);
      hi[d] = coord(center[d] + radius);
    }
    std::array<std::int64_t, D> c = lo;
    while (true) {
      if (auto it = cells_.find(pack(c)); it != cells_.end()) {
        for (int j : it->second)
          if ((points_[j] - center).norm() < radius) out.push_back(j);
      }
      int d = 0;
      while (d < D && ++c[d] > hi[d]) c[d++] = lo[d];
      if (d == D) break;
    }
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  std::int64_t coord(double x) const { return static_cast<std::int64_t>(std::floor(x / cell_)); }

  std::array<std::int64_t, D> key(const Vec<D>& p) const {
    std::array<std::int64_t, D> k;
    for (int d = 0; d < D; ++d) k[d] = coord(p[d]);
    return k;
  }

  static std::uint64_t pack(const std::array<std::int64_t, D>& k) {
    std::uint64_t h = 0x63656c6cull;
    for (int d = 0; d < D; ++d) h = splitmix64(h ^ static_cast<std::uint64_t>(k[d]));
    return h;
  }

  struct Hash {
    std::size_t operator()(std::uint64_t v) const { return v; }
  };

  std::vector<Vec<D>> points_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<int>, Hash> cells_;
};

template <int D>
SpatialIndex<D> build_index(const PointCloud<D>& cloud, double cell_size) {
  return SpatialIndex<D>(cloud.positions, cell_size);
}

enum class KernelFamily { WendlandC2, TruncatedPower };

/// Compactly supported radial weight: positive on [0, eps), zero outside,
/// nonincreasing.
class WeightKernel {
public:
  static WeightKernel wendland_c2(double eps) {
    return WeightKernel{KernelFamily::WendlandC2, eps, 0};
  }
  static WeightKernel truncated_power(double eps, int p) {
    if (p < 1) throw Error("WeightKernel: power must be >= 1");
    return WeightKernel{KernelFamily::TruncatedPower, eps, p};
  }

  double operator()(double r) const {
    const double s = r / eps_;
    if (s >= 1.0) return 0.0;
    if (family_ == KernelFamily::WendlandC2) {
      const double t = 1.0 - s;
      const double t2 = t * t;
      return t2 * t2 * (4.0 * s + 1.0);
    }
    return std::pow(1.0 - s, power_);
  }

  double support() const { return eps_; }
  KernelFamily family() const { return family_; }

private:
  WeightKernel(KernelFamily f, double eps, int p) : family_(f), eps_(eps), power_(p) {
    if (!(eps > 0.0)) throw Error("WeightKernel: support must be positive");
  }
  KernelFamily family_;
  double eps_;
  int power_;
};

template <int D>
struct Neighborhood {
  int center = -1;
  double epsilon = 0.0;
  std::vector<int> neighbors;       // sorted by index, center excluded
  std::vector<Vec<D>> midpoints;    // x_ij = x_i + m_ij (by construction)
  std::vector<Vec<D>> half_edges;   // m_ij = (x_j - x_i)/2
  std::vector<double> weights;      // Phi(||x_ij - x_i||), strictly positive

  int size() const { return static_cast<int>(neighbors.size()); }
};

template <int D>
Neighborhood<D> build_neighborhood(const SpatialIndex<D>& index, const PointCloud<D>& cloud,
                                   int i, double epsilon, const WeightKernel& kernel,
                                   int min_neighbors = 1) {
  if (!(epsilon > 0.0)) throw Error("build_neighborhood: epsilon must be positive");
  Neighborhood<D> nb;
  nb.center = i;
  nb.epsilon = epsilon;
  const Vec<D>& xi = cloud.positions[i];
  for (int j : index.query(xi, epsilon)) {
    if (j == i) continue;
    const Vec<D> m = 0.5 * (cloud.positions[j] - xi);
    const double w = kernel(m.norm());
    if (w <= 0.0) continue;  // outside the kernel support
    nb.neighbors.push_back(j);
    nb.half_edges.push_back(m);
    nb.midpoints.push_back(xi + m);
    nb.weights.push_back(w);
  }
  if (nb.size() < std::max(1, min_neighbors)) {
    throw StencilError(i, "stencil deficient at point " + std::to_string(i) + ": " +
                              std::to_string(nb.size()) + " neighbors, need >= " +
                              std::to_string(std::max(1, min_neighbors)));
  }
  return nb;
}

/// Support radius as a tuned multiple of the spacing h. The table is sized so
/// perturbed lattices (eta = 0.1 h) stay unisolvent for the midpoint sampling;
/// `safety` rescales the expected neighbor count.
inline double select_epsilon(int m, int d, double h, double safety = 1.0) {
  if (m < 1) throw Error("select_epsilon: m must be >= 1");
  if (d != 2 && d != 3) throw Error("select_epsilon: d must be 2 or 3");
  if (!(h > 0.0)) throw Error("select_epsilon: h must be positive");
  if (!(safety > 0.0)) throw Error("select_epsilon: safety must be positive");
  static const std::map<int, double> c2d = {{2, 2.9}, {4, 4.6}, {6, 6.4}};
  static const std::map<int, double> c3d = {{2, 2.6}, {4, 3.8}, {6, 5.2}};
  const auto& table = (d == 2) ? c2d : c3d;
  double c;
  if (m <= 2) {
    c = table.at(2);
  } else if (m >= 6) {
    c = table.at(6) + (m - 6) * 0.5 * (table.at(6) - table.at(4));
  } else {
    const int m0 = (m < 4) ? 2 : 4;
    const double c0 = table.at(m0), c1 = table.at(m0 + 2);
    c = c0 + (m - m0) * 0.5 * (c1 - c0);
  }
  return c * h * std::pow(safety, 1.0 / d);
}

}  // namespace stagmls::neighbors
