#pragma once

#include "dablog/matrix.hpp"
#include "dablog/rng.hpp"

namespace dablog::nn {

// Uniform [-scale, scale], row-major fill order.
inline void init_uniform(Matrix& m, Rng& rng, double scale) {
  for (double& v : m.data()) v = rng.uniform(-scale, scale);
}

// Glorot/Xavier uniform over the matrix shape.
inline void init_glorot(Matrix& m, Rng& rng) {
  const double scale = std::sqrt(6.0 / (m.rows() + m.cols()));
  init_uniform(m, rng, scale);
}

}  // namespace dablog::nn
