#pragma once

// Benchmark problem definitions (coefficients, exact solutions, data),
// discrete error norms, and convergence-rate fitting.

#include "stagmls/core.hpp"
#include "stagmls/geometry.hpp"
#include "stagmls/system.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace stagmls::problems {

using geometry::Domain;
using geometry::PointCloud;
using geometry::PointKind;

struct Raster {
  int width = 0;
  int height = 0;  // row 0 is the top of the image
  int maxval = 255;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
};

/// Reads an 8-bit grayscale PGM (P2 ASCII or P5 binary).
Raster load_pgm(const std::string& path);
void save_pgm(const Raster& img, const std::string& path, bool binary = true);

struct GrayBin {
  int lo = 0;
  int hi = 255;
  double mu = 1.0;
};

template <int D>
class CoefficientField {
public:
  enum class Kind { Constant, PiecewiseStrips, RadialTwoPhase, Raster };

  static CoefficientField constant(double value) {
    CoefficientField c;
    c.kind_ = Kind::Constant;
    c.values_ = {value};
    c.check(value);
    return c;
  }

  /// Piecewise constant in y: values[k] on [breaks[k-1], breaks[k]).
  static CoefficientField strips(std::vector<double> breaks, std::vector<double> values) {
    if (values.size() != breaks.size() + 1)
      throw Error("CoefficientField::strips: need one more value than breaks");
    CoefficientField c;
    c.kind_ = Kind::PiecewiseStrips;
    c.breaks_ = std::move(breaks);
    c.values_ = std::move(values);
    for (double v : c.values_) c.check(v);
    return c;
  }

  static CoefficientField radial_two_phase(const Vec<D>& center, double radius, double mu_in,
                                           double mu_out) {
    CoefficientField c;
    c.kind_ = Kind::RadialTwoPhase;
    c.center_ = center;
    c.radius_ = radius;
    c.values_ = {mu_in, mu_out};
    c.check(mu_in);
    c.check(mu_out);
    return c;
  }

  /// Nearest-pixel lookup, clamped at the image edges; the image spans
  /// [lo, hi] with row 0 at the top (largest y).
  static CoefficientField raster(Raster img, std::vector<GrayBin> bins, const Vec<D>& lo,
                                 const Vec<D>& hi)
    requires(D == 2)
  {
    std::vector<char> covered(256, 0);
    for (const auto& b : bins) {
      if (b.lo > b.hi || b.lo < 0 || b.hi > 255)
        throw Error("CoefficientField::raster: invalid gray range");
      for (int v = b.lo; v <= b.hi; ++v) covered[v] = 1;
      if (!(b.mu > 0.0)) throw Error("CoefficientField::raster: mu must be positive");
    }
    for (int v = 0; v < 256; ++v)
      if (!covered[v])
        throw Error("CoefficientField::raster: mapping has a gap at gray level " +
                    std::to_string(v));
    CoefficientField c;
    c.kind_ = Kind::Raster;
    c.img_ = std::make_shared<Raster>(std::move(img));
    c.bins_ = std::move(bins);
    c.lo_ = lo;
    c.hi_ = hi;
    return c;
  }

  Kind kind() const { return kind_; }

  double operator()(const Vec<D>& x) const {
    switch (kind_) {
      case Kind::Constant:
        return values_[0];
      case Kind::PiecewiseStrips: {
        std::size_t k = 0;
        while (k < breaks_.size() && x[1] >= breaks_[k]) ++k;
        return values_[k];
      }
      case Kind::RadialTwoPhase:
        return (x - center_).norm() < radius_ ? values_[0] : values_[1];
      case Kind::Raster: {
        const int col = clamp_index((x[0] - lo_[0]) / (hi_[0] - lo_[0]), img_->width);
        const int row = clamp_index((hi_[1] - x[1]) / (hi_[1] - lo_[1]), img_->height);
        const int gray = img_->at(row, col);
        for (const auto& b : bins_)
          if (gray >= b.lo && gray <= b.hi) return b.mu;
        return bins_.back().mu;  // unreachable: coverage validated
      }
    }
    return 1.0;
  }

  double max_value() const {
    double m = values_.empty() ? 1.0 : values_[0];
    for (double v : values_) m = std::max(m, v);
    if (kind_ == Kind::Raster) {
      m = bins_[0].mu;
      for (const auto& b : bins_) m = std::max(m, b.mu);
    }
    return m;
  }

  double min_value() const {
    double m = values_.empty() ? 1.0 : values_[0];
    for (double v : values_) m = std::min(m, v);
    if (kind_ == Kind::Raster) {
      m = bins_[0].mu;
      for (const auto& b : bins_) m = std::min(m, b.mu);
    }
    return m;
  }

private:
  static void check(double v) {
    if (!(v > 0.0)) throw Error("CoefficientField: mu must be positive");
  }
  static int clamp_index(double t, int n) {
    const int k = static_cast<int>(std::floor(t * n));
    return std::max(0, std::min(n - 1, k));
  }

  Kind kind_ = Kind::Constant;
  std::vector<double> breaks_;
  std::vector<double> values_;
  Vec<D> center_ = Vec<D>::Zero();
  double radius_ = 0.0;
  std::shared_ptr<const Raster> img_;
  std::vector<GrayBin> bins_;
  Vec<D> lo_ = Vec<D>::Zero(), hi_ = Vec<D>::Ones();
};

template <int D>
struct Problem {
  std::string name;
  Domain<D> domain;
  CoefficientField<D> mu = CoefficientField<D>::constant(1.0);
  std::function<double(const Vec<D>&)> source;                   // f
  std::function<double(const Vec<D>&)> phi_exact;                // may be empty
  std::function<Vec<D>(const Vec<D>&)> grad_exact;               // may be empty
  std::function<double(const Vec<D>&)> dirichlet;                // u
  std::function<double(const Vec<D>&, const Vec<D>&)> neumann;   // g(x, n)
  PointKind default_bc = PointKind::DirichletBoundary;

  bool has_exact() const { return static_cast<bool>(phi_exact); }
};

Problem<2> square_sine();
Problem<2> annulus_sine();
Problem<3> cylinder_sine();
Problem<2> five_strip_problem();
Problem<2> dielectric_cylinder_problem(double mu_in = 2.0, double mu_out = 1.0);
Problem<2> raster_problem(CoefficientField<2> mu);

CoefficientField<2> raster_coefficient(const std::string& path, std::vector<GrayBin> mapping);

/// Root-mean-square nodal error over all points.
template <int D>
double error_l2(const PointCloud<D>& cloud, const Eigen::VectorXd& solution,
                const std::function<double(const Vec<D>&)>& exact) {
  double s = 0.0;
  for (int i = 0; i < cloud.size(); ++i) {
    const double e = solution[i] - exact(cloud.positions[i]);
    s += e * e;
  }
  return std::sqrt(s / cloud.size());
}

/// RMS gradient error over interior points; the reconstructed physical flux
/// is normalized by -mu to recover the gradient approximation.
template <int D>
double error_h1(const PointCloud<D>& cloud, const std::vector<Vec<D>>& flux,
                const std::function<Vec<D>(const Vec<D>&)>& exact_grad,
                const CoefficientField<D>& mu) {
  double s = 0.0;
  int count = 0;
  for (int i = 0; i < cloud.size(); ++i) {
    if (cloud.kind[i] != PointKind::Interior) continue;
    const Vec<D> grad = -flux[i] / mu(cloud.positions[i]);
    s += (grad - exact_grad(cloud.positions[i])).squaredNorm();
    ++count;
  }
  if (count == 0) throw Error("error_h1: no interior points");
  return std::sqrt(s / count);
}

/// Least-squares slope of log(e) against log(h).
inline double fit_rate(std::span<const double> h, std::span<const double> e) {
  if (h.size() != e.size() || h.size() < 2) throw Error("fit_rate: need >= 2 samples");
  const int n = static_cast<int>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(std::max(e[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct ConvergenceRow {
  int resolution = 0;  // N with h = extent/N
  double h = 0.0;
  int points = 0;
  double e_l2 = 0.0;
  double e_h1 = 0.0;
  system::SolveReport solve;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double rate_l2 = 0.0;
  double rate_h1 = 0.0;

  void fit() {
    if (rows.size() < 3) throw Error("convergence: need >= 3 resolutions");
    std::vector<double> h, l2, h1;
    for (const auto& r : rows) {
      h.push_back(r.h);
      l2.push_back(r.e_l2);
      h1.push_back(r.e_h1);
    }
    rate_l2 = fit_rate(h, l2);
    rate_h1 = fit_rate(h, h1);
  }
};

}  // namespace stagmls::problems
