#pragma once

#include <cstdint>
#include <vector>

#include "dablog/nn/param.hpp"

namespace dablog::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list. Moment slots are laid
// out per parameter at construction; the update is
//   theta -= lr * m_hat / sqrt(v_hat + epsilon).
class Adam {
 public:
  Adam() = default;
  Adam(const ParamList& params, AdamConfig cfg);

  void step(const ParamList& params);

  std::int64_t t() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::int64_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace dablog::nn
