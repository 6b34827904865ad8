#include "dablog/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace dablog::nn {

Adam::Adam(const ParamList& params, AdamConfig cfg) : cfg_(cfg) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Param* p : params) {
    m_.emplace_back(p->w.size(), 0.0);
    v_.emplace_back(p->w.size(), 0.0);
  }
}

void Adam::step(const ParamList& params) {
  if (params.size() != m_.size()) throw std::invalid_argument("adam param list mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    std::vector<double>& m = m_[k];
    std::vector<double>& v = v_[k];
    const std::vector<double>& g = p.g.data();
    std::vector<double>& w = p.w.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      w[i] -= cfg_.lr * m_hat / std::sqrt(v_hat + cfg_.epsilon);
    }
  }
}

}  // namespace dablog::nn
