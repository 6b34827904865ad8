#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dablog/nn/param.hpp"

namespace dablog::testing {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Central finite differences over every entry of every parameter, compared
// against the analytic gradients left in Param::g by `run_backward`.
// `loss_only` must evaluate the identical loss without touching gradients.
inline GradCheckResult finite_difference_check(const nn::ParamList& params,
                                               const std::function<double()>& loss_only,
                                               const std::function<void()>& run_backward,
                                               double h = 1e-4, double floor = 1e-6) {
  nn::zero_grads(params);
  run_backward();

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const nn::Param* p : params) analytic.push_back(p->g.data());

  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    nn::Param& p = *params[k];
    for (std::size_t i = 0; i < p.w.size(); ++i) {
      const double saved = p.w.data()[i];
      p.w.data()[i] = saved + h;
      const double lp = loss_only();
      p.w.data()[i] = saved - h;
      const double lm = loss_only();
      p.w.data()[i] = saved;
      const double numeric = (lp - lm) / (2.0 * h);
      const double a = analytic[k][i];
      const double denom = std::max({std::fabs(a), std::fabs(numeric), floor});
      const double rel = std::fabs(a - numeric) / denom;
      if (rel > result.max_rel_err) {
        result.max_rel_err = rel;
        result.worst_param = p.name + "[" + std::to_string(i) + "]";
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace dablog::testing
