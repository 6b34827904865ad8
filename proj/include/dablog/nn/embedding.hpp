#pragma once

#include <stdexcept>
#include <vector>

#include "dablog/matrix.hpp"
#include "dablog/nn/init.hpp"
#include "dablog/nn/param.hpp"
#include "dablog/rng.hpp"

namespace dablog::nn {

// Trained lookup table mapping key ids to dense vectors. Row space covers
// the extended vocabulary (real keys plus BOS/EOS/UNK).
class Embedding {
 public:
  Embedding() = default;
  Embedding(int vocab_ext, int dim) : table("embedding", vocab_ext, dim) {}

  int vocab_ext() const { return table.w.rows(); }
  int dim() const { return table.w.cols(); }

  void init_params(Rng& rng) { init_uniform(table.w, rng, 0.05); }
  ParamList params() { return {&table}; }

  // Row t of the result is the embedding of ids[t].
  Matrix forward(const std::vector<int>& ids) const {
    Matrix out(static_cast<int>(ids.size()), dim());
    for (std::size_t t = 0; t < ids.size(); ++t) {
      const int id = ids[t];
      if (id < 0 || id >= vocab_ext()) throw std::out_of_range("embedding id out of range");
      const double* src = table.w.row(id);
      double* dst = out.row(static_cast<int>(t));
      for (int j = 0; j < dim(); ++j) dst[j] = src[j];
    }
    return out;
  }

  // Scatter-add: repeated ids accumulate into the same row.
  void backward(const std::vector<int>& ids, const Matrix& d_out) {
    for (std::size_t t = 0; t < ids.size(); ++t) {
      double* grad = table.g.row(ids[t]);
      const double* src = d_out.row(static_cast<int>(t));
      for (int j = 0; j < dim(); ++j) grad[j] += src[j];
    }
  }

  Param table;
};

}  // namespace dablog::nn
