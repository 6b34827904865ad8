#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dablog {

// Dense row-major matrix of 64-bit floats. All model math stays in doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix shape");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return a_.size(); }

  double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

  double* row(int r) { return a_.data() + static_cast<std::size_t>(r) * cols_; }
  const double* row(int r) const { return a_.data() + static_cast<std::size_t>(r) * cols_; }

  std::vector<double>& data() { return a_; }
  const std::vector<double>& data() const { return a_; }

  void fill(double v) { a_.assign(a_.size(), v); }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool all_finite() const {
    for (double v : a_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

// Rows in reverse order; reverse(reverse(m)) == m.
inline Matrix reverse(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r) {
    const double* src = m.row(m.rows() - 1 - r);
    double* dst = out.row(r);
    for (int c = 0; c < m.cols(); ++c) dst[c] = src[c];
  }
  return out;
}

// y[0..n) += x[0..m) * W, with W of shape m x n.
inline void vec_mat_acc(const double* x, int m, const Matrix& w, double* y) {
  for (int i = 0; i < m; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* wrow = w.row(i);
    for (int j = 0; j < w.cols(); ++j) y[j] += xi * wrow[j];
  }
}

// y[0..m) += d[0..n) * W^T, with W of shape m x n.
inline void vec_matT_acc(const double* d, int n, const Matrix& w, double* y) {
  for (int i = 0; i < w.rows(); ++i) {
    const double* wrow = w.row(i);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += d[j] * wrow[j];
    y[i] += acc;
  }
}

// W += x^T d, outer product of x[0..m) and d[0..n), W of shape m x n.
inline void outer_acc(const double* x, int m, const double* d, int n, Matrix& w) {
  for (int i = 0; i < m; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    double* wrow = w.row(i);
    for (int j = 0; j < n; ++j) wrow[j] += xi * d[j];
  }
}

}  // namespace dablog
