#pragma once

#include <string>
#include <vector>

#include "dablog/matrix.hpp"

namespace dablog::nn {

// One trainable array together with its gradient accumulator.
struct Param {
  std::string name;
  Matrix w;
  Matrix g;

  Param() = default;
  Param(std::string n, int rows, int cols) : name(std::move(n)), w(rows, cols), g(rows, cols) {}

  void zero_grad() { g.fill(0.0); }
};

using ParamList = std::vector<Param*>;

inline void zero_grads(const ParamList& params) {
  for (Param* p : params) p->zero_grad();
}

// Scales all gradients so their global L2 norm does not exceed max_norm.
// A max_norm <= 0 disables clipping.
void clip_global_norm(const ParamList& params, double max_norm);

}  // namespace dablog::nn
