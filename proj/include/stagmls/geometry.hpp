#pragma once

// Point cloud generation over the supported computational domains:
// lattice interior (optionally perturbed) plus arclength-sampled boundary.

#include "stagmls/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

namespace stagmls::geometry {

enum class PointKind : int { Interior = 0, DirichletBoundary = 1, NeumannBoundary = 2 };

template <int D>
using BcAssignment = std::function<PointKind(const Vec<D>&, const Vec<D>&)>;

template <int D>
inline BcAssignment<D> all_dirichlet() {
  return [](const Vec<D>&, const Vec<D>&) { return PointKind::DirichletBoundary; };
}

template <int D>
inline BcAssignment<D> all_neumann() {
  return [](const Vec<D>&, const Vec<D>&) { return PointKind::NeumannBoundary; };
}

template <int D>
class Domain {
public:
  enum class Shape { UnitSquare, Annulus, ExtrudedAnnulus };

  static Domain unit_square()
    requires(D == 2)
  {
    Domain d;
    d.shape_ = Shape::UnitSquare;
    return d;
  }

  static Domain annulus(double r_inner, double r_outer)
    requires(D == 2)
  {
    if (!(0.0 < r_inner && r_inner < r_outer))
      throw GeometryError("annulus: need 0 < r_inner < r_outer");
    Domain d;
    d.shape_ = Shape::Annulus;
    d.ri_ = r_inner;
    d.ro_ = r_outer;
    return d;
  }

  static Domain extruded_annulus(double r_inner, double r_outer, double height)
    requires(D == 3)
  {
    if (!(0.0 < r_inner && r_inner < r_outer) || height <= 0.0)
      throw GeometryError("extruded_annulus: need 0 < r_inner < r_outer and height > 0");
    Domain d;
    d.shape_ = Shape::ExtrudedAnnulus;
    d.ri_ = r_inner;
    d.ro_ = r_outer;
    d.height_ = height;
    return d;
  }

  Shape shape() const { return shape_; }
  double r_inner() const { return ri_; }
  double r_outer() const { return ro_; }
  double height() const { return height_; }

  /// Negative strictly inside, positive outside, zero on the boundary.
  double signed_distance(const Vec<D>& x) const {
    switch (shape_) {
      case Shape::UnitSquare: {
        double inside = -std::numeric_limits<double>::infinity();
        double outside_sq = 0.0;
        for (int d = 0; d < D; ++d) {
          const double q = std::max(-x[d], x[d] - 1.0);
          inside = std::max(inside, q);
          outside_sq += std::max(q, 0.0) * std::max(q, 0.0);
        }
        return inside <= 0.0 ? inside : std::sqrt(outside_sq);
      }
      case Shape::Annulus: {
        const double r = x.norm();
        return std::max(ri_ - r, r - ro_);
      }
      case Shape::ExtrudedAnnulus: {
        const double r = std::hypot(x[0], x[1]);
        const double planar = std::max(ri_ - r, r - ro_);
        const double axial = std::max(-x[D - 1], x[D - 1] - height_);
        return std::max(planar, axial);
      }
    }
    return 0.0;
  }

  /// Edge length of the axis-aligned bounding box (the largest extent).
  double extent() const {
    switch (shape_) {
      case Shape::UnitSquare:
        return 1.0;
      case Shape::Annulus:
        return 2.0 * ro_;
      case Shape::ExtrudedAnnulus:
        return std::max(2.0 * ro_, height_);
    }
    return 0.0;
  }

  double diameter() const {
    if constexpr (D == 3) {
      if (shape_ == Shape::ExtrudedAnnulus) return std::hypot(2.0 * ro_, height_);
    }
    return shape_ == Shape::UnitSquare ? std::numbers::sqrt2 : 2.0 * ro_;
  }

  /// Smallest interior width; a lattice coarser than this cannot resolve the domain.
  double feature_size() const {
    switch (shape_) {
      case Shape::UnitSquare:
        return 1.0;
      case Shape::Annulus:
        return ro_ - ri_;
      case Shape::ExtrudedAnnulus:
        return std::min(ro_ - ri_, height_);
    }
    return 0.0;
  }

  Vec<D> bbox_lo() const {
    Vec<D> lo = Vec<D>::Zero();
    if (shape_ != Shape::UnitSquare) {
      lo[0] = -ro_;
      lo[1] = -ro_;
    }
    return lo;
  }

  Vec<D> bbox_hi() const {
    Vec<D> hi = Vec<D>::Ones();
    if (shape_ == Shape::Annulus) {
      hi[0] = ro_;
      hi[1] = ro_;
    } else if constexpr (D == 3) {
      if (shape_ == Shape::ExtrudedAnnulus) {
        hi[0] = ro_;
        hi[1] = ro_;
        hi[2] = height_;
      }
    }
    return hi;
  }

  /// Samples the boundary at arclength spacing <= dx with outward unit normals.
  void sample_boundary(double dx, std::vector<Vec<D>>& points,
                       std::vector<Vec<D>>& normals) const {
    points.clear();
    normals.clear();
    if constexpr (D == 2) {
      if (shape_ == Shape::UnitSquare) {
        sample_square(dx, points, normals);
      } else {
        sample_circle(ro_, dx, +1.0, 0.0, points, normals);
        sample_circle(ri_, dx, -1.0, 0.0, points, normals);
      }
    } else {
      sample_lateral(ro_, dx, +1.0, points, normals);
      sample_lateral(ri_, dx, -1.0, points, normals);
      sample_disk(0.0, dx, -1.0, points, normals);
      sample_disk(height_, dx, +1.0, points, normals);
    }
  }

private:
  Shape shape_ = Shape::UnitSquare;
  double ri_ = 0.0, ro_ = 0.0, height_ = 0.0;

  static void sample_square(double dx, std::vector<Vec<2>>& pts, std::vector<Vec<2>>& nrm) {
    const int n = std::max(4, static_cast<int>(std::ceil(4.0 / dx)));
    const double step = 4.0 / n;
    for (int k = 0; k < n; ++k) {
      const double t = k * step;
      const int edge = std::min(3, static_cast<int>(t));  // edges have unit length
      const double u = t - edge;
      Vec<2> p, nv;
      switch (edge) {
        case 0: p << u, 0.0; nv << 0.0, -1.0; break;
        case 1: p << 1.0, u; nv << 1.0, 0.0; break;
        case 2: p << 1.0 - u, 1.0; nv << 0.0, 1.0; break;
        default: p << 0.0, 1.0 - u; nv << -1.0, 0.0; break;
      }
      pts.push_back(p);
      nrm.push_back(nv);
    }
  }

  static void sample_circle(double radius, double dx, double orient, double z,
                            std::vector<Vec<D>>& pts, std::vector<Vec<D>>& nrm) {
    const int n = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / dx)));
    for (int k = 0; k < n; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / n;
      const double c = std::cos(theta), s = std::sin(theta);
      Vec<D> p = Vec<D>::Zero(), nv = Vec<D>::Zero();
      p[0] = radius * c;
      p[1] = radius * s;
      nv[0] = orient * c;
      nv[1] = orient * s;
      if constexpr (D == 3) p[2] = z;
      pts.push_back(p);
      nrm.push_back(nv);
    }
  }

  void sample_lateral(double radius, double dx, double orient, std::vector<Vec<D>>& pts,
                      std::vector<Vec<D>>& nrm) const
    requires(D == 3)
  {
    const int nz = std::max(1, static_cast<int>(std::ceil(height_ / dx)));
    for (int l = 0; l <= nz; ++l) {
      sample_circle(radius, dx, orient, height_ * l / nz, pts, nrm);
    }
  }

  // Top/bottom annular caps: lattice samples kept clear of the rim circles so the
  // cap points cannot crowd the lateral rings at z = 0 and z = height.
  void sample_disk(double z, double dx, double nz, std::vector<Vec<D>>& pts,
                   std::vector<Vec<D>>& nrm) const
    requires(D == 3)
  {
    const int n = static_cast<int>(std::floor(2.0 * ro_ / dx)) + 1;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Vec<3> p;
        p << -ro_ + i * dx, -ro_ + j * dx, z;
        const double r = std::hypot(p[0], p[1]);
        if (std::max(ri_ - r, r - ro_) < -0.5 * dx) {
          pts.push_back(p);
          Vec<3> nv;
          nv << 0.0, 0.0, nz;
          nrm.push_back(nv);
        }
      }
    }
  }
};

template <int D>
struct PointCloud {
  std::vector<Vec<D>> positions;
  std::vector<PointKind> kind;
  std::vector<Vec<D>> normals;  // zero vector at interior points
  double h = 0.0;               // nominal lattice spacing
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(positions.size()); }
  bool is_boundary(int i) const { return kind[i] != PointKind::Interior; }

  int count(PointKind k) const {
    return static_cast<int>(std::count(kind.begin(), kind.end(), k));
  }
};

/// Lattice + boundary discretization. Boundary points come first, then the
/// perturbed interior lattice. `guard_band < 0` selects the default dx/2 band;
/// interior candidates closer to the boundary than the band are dropped.
template <int D>
PointCloud<D> discretize(const Domain<D>& domain, double dx, double eta, std::uint64_t seed,
                         BcAssignment<D> bc = {}, double guard_band = -1.0) {
  if (!(dx > 0.0)) throw GeometryError("discretize: dx must be positive");
  if (!(eta >= 0.0 && eta < 0.5 * dx))
    throw GeometryError("discretize: eta must satisfy 0 <= eta < dx/2");
  if (dx > domain.feature_size()) throw GeometryError("resolution too coarse");
  if (guard_band < 0.0) guard_band = 0.5 * dx;
  if (!bc) bc = all_dirichlet<D>();

  PointCloud<D> cloud;
  cloud.h = dx;
  cloud.seed = seed;

  std::vector<Vec<D>> bpts, bnrm;
  domain.sample_boundary(dx, bpts, bnrm);
  for (std::size_t k = 0; k < bpts.size(); ++k) {
    cloud.positions.push_back(bpts[k]);
    cloud.normals.push_back(bnrm[k]);
    cloud.kind.push_back(bc(bpts[k], bnrm[k]));
  }

  const Vec<D> lo = domain.bbox_lo();
  const Vec<D> hi = domain.bbox_hi();
  std::array<int, D> n;
  for (int d = 0; d < D; ++d)
    n[d] = static_cast<int>(std::floor((hi[d] - lo[d]) / dx + 1e-12)) + 1;

  std::array<int, D> ix{};
  int interior = 0;
  while (true) {
    Vec<D> p;
    std::uint64_t key = splitmix64(seed ^ 0x706f696e74ull);
    for (int d = 0; d < D; ++d) {
      p[d] = lo[d] + ix[d] * dx;
      key = splitmix64(key ^ static_cast<std::uint64_t>(ix[d]));
    }
    if (eta > 0.0) {
      for (int d = 0; d < D; ++d)
        p[d] += eta * hash_to_pm1(splitmix64(key ^ static_cast<std::uint64_t>(d + 1)));
    }
    if (domain.signed_distance(p) < -guard_band) {
      cloud.positions.push_back(p);
      cloud.normals.push_back(Vec<D>::Zero());
      cloud.kind.push_back(PointKind::Interior);
      ++interior;
    }
    int d = 0;
    while (d < D && ++ix[d] >= n[d]) ix[d++] = 0;
    if (d == D) break;
  }

  if (interior == 0) throw GeometryError("discretize: empty interior");
  return cloud;
}

struct SpacingReport {
  double nominal;            // dx stored at generation
  double max_min_neighbor;   // max over points of the nearest-neighbor distance
};

template <int D>
SpacingReport characteristic_spacing(const PointCloud<D>& cloud) {
  if (cloud.size() < 2) throw GeometryError("characteristic_spacing: need >= 2 points");
  double worst = 0.0;
  for (int i = 0; i < cloud.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < cloud.size(); ++j) {
      if (j == i) continue;
      best = std::min(best, (cloud.positions[j] - cloud.positions[i]).norm());
    }
    worst = std::max(worst, best);
  }
  return {cloud.h, worst};
}

}  // namespace stagmls::geometry
