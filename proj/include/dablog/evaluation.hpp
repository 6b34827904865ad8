#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dablog/detector.hpp"
#include "dablog/sequencer.hpp"

namespace dablog {

// Sequence-level confusion counts; positive = abnormal.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
};

struct MetricReport {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double fp_rate = 0.0;
  double accuracy = 0.0;
  bool degenerate = false;  // set when any denominator was zero
};

using LabelMap = std::unordered_map<std::string, Label>;

// Both maps must cover exactly the same session ids.
ConfusionCounts confusion(const LabelMap& predicted, const LabelMap& truth);

MetricReport metrics(const ConfusionCounts& c);

// Re-judges cached scores at every theta of the ascending grid. Scores and
// truth must cover the same sessions.
std::vector<std::pair<double, ConfusionCounts>> sweep(const std::vector<SessionScore>& scores,
                                                      const LabelMap& truth,
                                                      const std::vector<double>& theta_grid,
                                                      int v_ext);

// Trapezoidal area under the ROC curve through the given (fp_rate, tp_rate)
// points, augmented with (0,0) and (1,1).
double roc_auc(std::vector<std::pair<double, double>> points);

// ROC points (fp_rate, tp_rate) from a sweep result.
std::vector<std::pair<double, double>> roc_points(
    const std::vector<std::pair<double, ConfusionCounts>>& sweep_result);

}  // namespace dablog
