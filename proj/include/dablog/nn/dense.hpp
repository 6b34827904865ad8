#pragma once

#include <stdexcept>

#include "dablog/matrix.hpp"
#include "dablog/nn/init.hpp"
#include "dablog/nn/param.hpp"
#include "dablog/rng.hpp"

namespace dablog::nn {

// Softmax over each row with max-subtraction. Throws on non-finite logits.
Matrix softmax_rows(const Matrix& logits);

// Categorical cross-entropy summed over rows: -sum_t log p_t[true index].
// Probabilities are clamped below at 1e-12 before the log. `truth` rows
// must be one-hot over the same columns as `probs`.
double cross_entropy_loss(const Matrix& truth, const Matrix& probs);

// Single fully connected layer with softmax activation — the event
// classifier head.
class DenseSoftmax {
 public:
  DenseSoftmax() = default;
  DenseSoftmax(std::string name, int in_dim, int out_dim)
      : w(name + ".W", in_dim, out_dim), b(name + ".b", 1, out_dim) {}

  int in_dim() const { return w.w.rows(); }
  int out_dim() const { return w.w.cols(); }

  void init_params(Rng& rng) {
    init_glorot(w.w, rng);
    b.w.fill(0.0);
  }
  ParamList params() { return {&w, &b}; }

  // Probabilities, shape (rows of x) x out_dim; every row sums to 1.
  Matrix forward(const Matrix& x) const;

  // Combined softmax + cross-entropy gradient: given the forward input,
  // the produced probabilities and the one-hot truth, accumulates dW/db
  // and returns the gradient w.r.t. x. d_logits = probs - truth.
  Matrix backward(const Matrix& x, const Matrix& probs, const Matrix& truth);

  Param w;
  Param b;
};

}  // namespace dablog::nn
