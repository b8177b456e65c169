#pragma once

// Scaled, shifted Taylor monomial bases p_a(x) = ((x - c)/eps)^a / a! in
// graded-lexicographic order, with the center-evaluated functionals used by
// the stencil construction.

#include "stagmls/core.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <vector>

namespace stagmls::basis {

template <int D>
struct MultiIndex {
  std::array<int, D> a{};

  int order() const {
    int s = 0;
    for (int d = 0; d < D; ++d) s += a[d];
    return s;
  }

  double factorial() const {
    double f = 1.0;
    for (int d = 0; d < D; ++d)
      for (int k = 2; k <= a[d]; ++k) f *= k;
    return f;
  }
};

namespace detail {
template <int D>
void enumerate_grade(int grade, int dim, MultiIndex<D>& cur, std::vector<MultiIndex<D>>& out) {
  if (dim == D - 1) {
    cur.a[dim] = grade;
    out.push_back(cur);
    return;
  }
  for (int k = grade; k >= 0; --k) {
    cur.a[dim] = k;
    enumerate_grade<D>(grade - k, dim + 1, cur, out);
  }
}
}  // namespace detail

/// Multi-indices with |a| <= m, graded first, lexicographic (leading exponent
/// descending) within a grade. `include_constant` controls whether |a| = 0 is listed.
template <int D>
std::vector<MultiIndex<D>> graded_lex_indices(int m, bool include_constant) {
  std::vector<MultiIndex<D>> out;
  for (int grade = include_constant ? 0 : 1; grade <= m; ++grade) {
    MultiIndex<D> cur;
    detail::enumerate_grade<D>(grade, 0, cur, out);
  }
  return out;
}

template <int D>
class TaylorBasis {
public:
  TaylorBasis(const Vec<D>& center, double scale, int degree, bool include_constant)
      : center_(center), scale_(scale), degree_(degree), include_constant_(include_constant),
        idx_(graded_lex_indices<D>(degree, include_constant)) {
    if (!(scale > 0.0)) throw Error("TaylorBasis: scale must be positive");
    if (degree < 1) throw Error("TaylorBasis: degree must be >= 1");
    inv_fact_.reserve(idx_.size());
    for (const auto& mi : idx_) inv_fact_.push_back(1.0 / mi.factorial());
  }

  int size() const { return static_cast<int>(idx_.size()); }
  int degree() const { return degree_; }
  double scale() const { return scale_; }
  const Vec<D>& center() const { return center_; }
  bool includes_constant() const { return include_constant_; }
  const std::vector<MultiIndex<D>>& indices() const { return idx_; }

  /// out[k] = p_k(x); `out` must hold size() entries.
  void eval_row(const Vec<D>& x, double* out) const {
    std::array<std::array<double, 7>, D> pw;  // pw[d][k] = y_d^k, degree <= 6 typical
    Vec<D> y = (x - center_) / scale_;
    for (int d = 0; d < D; ++d) {
      pw[d][0] = 1.0;
      for (int k = 1; k <= degree_ && k < 7; ++k) pw[d][k] = pw[d][k - 1] * y[d];
    }
    for (std::size_t k = 0; k < idx_.size(); ++k) {
      double v = inv_fact_[k];
      for (int d = 0; d < D; ++d) {
        const int e = idx_[k].a[d];
        v *= (e < 7) ? pw[d][e] : std::pow(y[d], e);
      }
      out[k] = v;
    }
  }

  Eigen::VectorXd eval_row(const Vec<D>& x) const {
    Eigen::VectorXd r(size());
    eval_row(x, r.data());
    return r;
  }

  /// (Delta p_k)(center): 1/eps^2 at a = 2 e_d, zero elsewhere.
  Eigen::VectorXd laplacian_at_center() const {
    if (degree_ < 2) throw Error("laplacian_at_center: degree must be >= 2");
    Eigen::VectorXd r = Eigen::VectorXd::Zero(size());
    const double s = 1.0 / (scale_ * scale_);
    for (int k = 0; k < size(); ++k) {
      if (idx_[k].order() != 2) continue;
      for (int d = 0; d < D; ++d)
        if (idx_[k].a[d] == 2) r[k] = s;
    }
    return r;
  }

  /// Row k = (grad p_k)(center): 1/eps at a = e_d, zero elsewhere.
  Eigen::MatrixXd gradient_at_center() const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size(), D);
    const double s = 1.0 / scale_;
    for (int k = 0; k < size(); ++k) {
      if (idx_[k].order() != 1) continue;
      for (int d = 0; d < D; ++d)
        if (idx_[k].a[d] == 1) g(k, d) = s;
    }
    return g;
  }

  Eigen::VectorXd normal_derivative_at_center(const Vec<D>& n) const {
    if (std::abs(n.norm() - 1.0) > 1e-12)
      throw Error("normal_derivative_at_center: normal must be a unit vector");
    return gradient_at_center() * n;
  }

private:
  Vec<D> center_;
  double scale_;
  int degree_;
  bool include_constant_;
  std::vector<MultiIndex<D>> idx_;
  std::vector<double> inv_fact_;
};

}  // namespace stagmls::basis
