#pragma once

// Test-only oracles, deliberately independent of the library implementation:
// a raw-monomial polynomial type with symbolic derivatives, a perturbed
// lattice cloud builder, and a log-log slope fit.

#include "stagmls/core.hpp"
#include "stagmls/geometry.hpp"

#include <array>
#include <cmath>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using stagmls::Vec;

/// Polynomial as a map from raw exponent tuples to coefficients.
template <int D>
struct Poly {
  std::map<std::array<int, D>, double> terms;

  double eval(const Vec<D>& x) const {
    double s = 0.0;
    for (const auto& [a, c] : terms) {
      double t = c;
      for (int d = 0; d < D; ++d)
        for (int k = 0; k < a[d]; ++k) t *= x[d];
      s += t;
    }
    return s;
  }

  Poly derivative(int dim) const {
    Poly out;
    for (const auto& [a, c] : terms) {
      if (a[dim] == 0) continue;
      std::array<int, D> b = a;
      b[dim] -= 1;
      out.terms[b] += c * a[dim];
    }
    return out;
  }

  double laplacian_at(const Vec<D>& x) const {
    double s = 0.0;
    for (int d = 0; d < D; ++d) s += derivative(d).derivative(d).eval(x);
    return s;
  }

  Vec<D> gradient_at(const Vec<D>& x) const {
    Vec<D> g;
    for (int d = 0; d < D; ++d) g[d] = derivative(d).eval(x);
    return g;
  }

  static Poly random(int degree, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    Poly p;
    std::array<int, D> a{};
    while (true) {
      int total = 0;
      for (int d = 0; d < D; ++d) total += a[d];
      if (total <= degree) p.terms[a] = coeff(rng);
      int d = 0;
      while (d < D && ++a[d] > degree) a[d++] = 0;
      if (d == D) break;
    }
    // drop terms above the requested degree
    for (auto it = p.terms.begin(); it != p.terms.end();) {
      int total = 0;
      for (int d = 0; d < D; ++d) total += it->first[d];
      it = (total > degree) ? p.terms.erase(it) : std::next(it);
    }
    return p;
  }
};

/// Perturbed lattice filling [-half, half]^D with pitch dx; all points marked
/// interior. Independent of the library's domain sampling.
template <int D>
stagmls::geometry::PointCloud<D> lattice_cloud(double dx, double eta, std::uint64_t seed,
                                               int half_cells) {
  stagmls::geometry::PointCloud<D> cloud;
  cloud.h = dx;
  cloud.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-eta, eta);
  std::array<int, D> ix;
  ix.fill(-half_cells);
  while (true) {
    Vec<D> p;
    for (int d = 0; d < D; ++d) p[d] = ix[d] * dx + (eta > 0.0 ? jitter(rng) : 0.0);
    cloud.positions.push_back(p);
    cloud.kind.push_back(stagmls::geometry::PointKind::Interior);
    cloud.normals.push_back(Vec<D>::Zero());
    int d = 0;
    while (d < D && ++ix[d] > half_cells) ix[d++] = -half_cells;
    if (d == D) break;
  }
  return cloud;
}

template <int D>
int closest_point(const stagmls::geometry::PointCloud<D>& cloud, const Vec<D>& target) {
  int best = 0;
  double dist = (cloud.positions[0] - target).norm();
  for (int i = 1; i < cloud.size(); ++i) {
    const double d = (cloud.positions[i] - target).norm();
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return best;
}

/// Ordinary least-squares slope of log(e) against log(h).
inline double loglog_slope(const std::vector<double>& h, const std::vector<double>& e) {
  const int n = static_cast<int>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// O(N^2) reference for range queries: {j : ||x_j - c|| < r}.
template <int D>
std::vector<int> brute_force_ball(const std::vector<Vec<D>>& pts, const Vec<D>& c, double r) {
  std::vector<int> out;
  for (int j = 0; j < static_cast<int>(pts.size()); ++j)
    if ((pts[j] - c).norm() < r) out.push_back(j);
  return out;
}

}  // namespace oracle
