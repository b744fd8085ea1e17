#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace affgeo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A bilinear map E x E -> F stored as an out x (in*in) matrix so that
/// B(v, w)_k = sum_ij data(k, i*in + j) v_i w_j.
///
/// The same type holds connection coefficients B_x, second derivatives d2h of
/// chart transitions, and Hessians of vector fields.
class BilinearMap {
 public:
  BilinearMap() = default;
  BilinearMap(int out_dim, int in_dim) : in_(in_dim), data_(Mat::Zero(out_dim, in_dim * in_dim)) {}

  static BilinearMap zero(int out_dim, int in_dim) { return BilinearMap(out_dim, in_dim); }

  int out_dim() const { return static_cast<int>(data_.rows()); }
  int in_dim() const { return in_; }

  double& at(int k, int i, int j) { return data_(k, i * in_ + j); }
  double at(int k, int i, int j) const { return data_(k, i * in_ + j); }

  Vec operator()(const Vec& v, const Vec& w) const {
    Vec out = Vec::Zero(out_dim());
    for (int i = 0; i < in_; ++i) {
      if (v[i] == 0.0) continue;
      out.noalias() += v[i] * data_.middleCols(i * in_, in_) * w;
    }
    return out;
  }

  /// w -> B(v, w)
  Mat fix_first(const Vec& v) const {
    Mat m = Mat::Zero(out_dim(), in_);
    for (int i = 0; i < in_; ++i) m.noalias() += v[i] * data_.middleCols(i * in_, in_);
    return m;
  }

  /// v -> B(v, w)
  Mat fix_second(const Vec& w) const {
    Mat m(out_dim(), in_);
    for (int i = 0; i < in_; ++i) m.col(i) = data_.middleCols(i * in_, in_) * w;
    return m;
  }

  /// (v, w) -> B(w, v)
  BilinearMap swapped() const {
    BilinearMap s(out_dim(), in_);
    for (int k = 0; k < out_dim(); ++k)
      for (int i = 0; i < in_; ++i)
        for (int j = 0; j < in_; ++j) s.at(k, i, j) = at(k, j, i);
    return s;
  }

  BilinearMap& operator+=(const BilinearMap& o) {
    data_ += o.data_;
    return *this;
  }
  BilinearMap& operator-=(const BilinearMap& o) {
    data_ -= o.data_;
    return *this;
  }
  BilinearMap& operator*=(double a) {
    data_ *= a;
    return *this;
  }
  friend BilinearMap operator+(BilinearMap a, const BilinearMap& b) { return a += b; }
  friend BilinearMap operator-(BilinearMap a, const BilinearMap& b) { return a -= b; }
  friend BilinearMap operator*(double s, BilinearMap a) { return a *= s; }

  /// Post-composition with a linear map L: (v, w) -> L B(v, w).
  BilinearMap compose_left(const Mat& l) const {
    BilinearMap r;
    r.in_ = in_;
    r.data_ = l * data_;
    return r;
  }

  /// Pre-composition with linear maps: (v, w) -> B(P v, Q w).
  BilinearMap compose_right(const Mat& p, const Mat& q) const {
    const int m = static_cast<int>(p.cols());
    BilinearMap r(out_dim(), m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        Vec col = (*this)(p.col(a), q.col(b));
        for (int k = 0; k < out_dim(); ++k) r.at(k, a, b) = col[k];
      }
    return r;
  }

  double max_abs() const { return data_.size() == 0 ? 0.0 : data_.cwiseAbs().maxCoeff(); }
  const Mat& data() const { return data_; }

 private:
  int in_ = 0;
  Mat data_;
};

namespace fd {

inline double step1(const Vec& x) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, x.norm());
}
inline double step2(const Vec& x) {
  return std::pow(std::numeric_limits<double>::epsilon(), 0.25) * std::max(1.0, x.norm());
}

}  // namespace fd

/// Flatten an n x n matrix row-major (the layout used for frame states).
inline Vec flatten_rowmajor(const Mat& m) {
  Vec out(m.size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  return out;
}

inline Mat unflatten_rowmajor(const Eigen::Ref<const Vec>& v, int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v[i * n + j];
  return m;
}

inline double operator_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

}  // namespace affgeo
