#include "dablog/nn/dense.hpp"

#include <cmath>

namespace dablog::nn {

Matrix softmax_rows(const Matrix& logits) {
  if (!logits.all_finite()) throw std::domain_error("non-finite logits");
  Matrix probs(logits.rows(), logits.cols());
  for (int r = 0; r < logits.rows(); ++r) {
    const double* z = logits.row(r);
    double* p = probs.row(r);
    double zmax = z[0];
    for (int c = 1; c < logits.cols(); ++c) zmax = std::max(zmax, z[c]);
    double sum = 0.0;
    for (int c = 0; c < logits.cols(); ++c) {
      p[c] = std::exp(z[c] - zmax);
      sum += p[c];
    }
    for (int c = 0; c < logits.cols(); ++c) p[c] /= sum;
  }
  return probs;
}

double cross_entropy_loss(const Matrix& truth, const Matrix& probs) {
  if (!truth.same_shape(probs)) throw std::invalid_argument("loss shape mismatch");
  double loss = 0.0;
  for (int r = 0; r < truth.rows(); ++r) {
    const double* y = truth.row(r);
    const double* p = probs.row(r);
    for (int c = 0; c < truth.cols(); ++c) {
      if (y[c] != 0.0) loss -= y[c] * std::log(std::max(p[c], 1e-12));
    }
  }
  return loss;
}

Matrix DenseSoftmax::forward(const Matrix& x) const {
  if (x.cols() != in_dim()) throw std::invalid_argument("dense input width mismatch");
  Matrix logits(x.rows(), out_dim());
  for (int r = 0; r < x.rows(); ++r) {
    double* row = logits.row(r);
    for (int c = 0; c < out_dim(); ++c) row[c] = b.w(0, c);
    vec_mat_acc(x.row(r), in_dim(), w.w, row);
  }
  return softmax_rows(logits);
}

Matrix DenseSoftmax::backward(const Matrix& x, const Matrix& probs, const Matrix& truth) {
  Matrix d_x(x.rows(), in_dim());
  std::vector<double> d_logits(static_cast<std::size_t>(out_dim()));
  for (int r = 0; r < x.rows(); ++r) {
    const double* p = probs.row(r);
    const double* y = truth.row(r);
    for (int c = 0; c < out_dim(); ++c) d_logits[c] = p[c] - y[c];
    outer_acc(x.row(r), in_dim(), d_logits.data(), out_dim(), w.g);
    for (int c = 0; c < out_dim(); ++c) b.g(0, c) += d_logits[c];
    vec_matT_acc(d_logits.data(), out_dim(), w.w, d_x.row(r));
  }
  return d_x;
}

}  // namespace dablog::nn
