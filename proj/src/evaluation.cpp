#include "dablog/evaluation.hpp"

#include <algorithm>
#include <stdexcept>

#include "dablog/critic.hpp"

namespace dablog {

ConfusionCounts confusion(const LabelMap& predicted, const LabelMap& truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("label key sets differ");
  ConfusionCounts c;
  for (const auto& [sid, truth_label] : truth) {
    auto it = predicted.find(sid);
    if (it == predicted.end()) throw std::invalid_argument("missing prediction for " + sid);
    const bool actual_abnormal = truth_label == Label::Abnormal;
    const bool predicted_abnormal = it->second == Label::Abnormal;
    if (actual_abnormal && predicted_abnormal) ++c.tp;
    else if (actual_abnormal) ++c.fn;
    else if (predicted_abnormal) ++c.fp;
    else ++c.tn;
  }
  return c;
}

MetricReport metrics(const ConfusionCounts& c) {
  MetricReport r;
  auto ratio = [&r](std::int64_t num, std::int64_t den) {
    if (den == 0) {
      r.degenerate = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.recall = ratio(c.tp, c.tp + c.fn);
  r.precision = ratio(c.tp, c.tp + c.fp);
  r.fp_rate = ratio(c.fp, c.fp + c.tn);
  r.accuracy = ratio(c.tp + c.tn, c.total());
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  } else {
    r.f1 = 0.0;
    r.degenerate = true;
  }
  return r;
}

std::vector<std::pair<double, ConfusionCounts>> sweep(const std::vector<SessionScore>& scores,
                                                      const LabelMap& truth,
                                                      const std::vector<double>& theta_grid,
                                                      int v_ext) {
  if (theta_grid.empty()) throw std::invalid_argument("empty theta grid");
  if (!std::is_sorted(theta_grid.begin(), theta_grid.end())) {
    throw std::invalid_argument("theta grid must be ascending");
  }
  std::vector<std::pair<double, ConfusionCounts>> out;
  out.reserve(theta_grid.size());
  for (double theta : theta_grid) {
    const int slots = rank_slots(theta, v_ext);
    LabelMap predicted;
    predicted.reserve(scores.size());
    for (const auto& s : scores) {
      predicted[s.session_id] = s.worst_rank() > slots ? Label::Abnormal : Label::Normal;
    }
    out.emplace_back(theta, confusion(predicted, truth));
  }
  return out;
}

double roc_auc(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw std::invalid_argument("no roc points");
  for (const auto& [x, y] : points) {
    if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) {
      throw std::invalid_argument("roc coordinates outside [0, 1]");
    }
  }
  points.emplace_back(0.0, 0.0);
  points.emplace_back(1.0, 1.0);
  std::sort(points.begin(), points.end());
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double dx = points[i].first - points[i - 1].first;
    area += dx * (points[i].second + points[i - 1].second) / 2.0;
  }
  return area;
}

std::vector<std::pair<double, double>> roc_points(
    const std::vector<std::pair<double, ConfusionCounts>>& sweep_result) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(sweep_result.size());
  for (const auto& [theta, c] : sweep_result) {
    const double fpr = (c.fp + c.tn) > 0 ? static_cast<double>(c.fp) / (c.fp + c.tn) : 0.0;
    const double tpr = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    pts.emplace_back(fpr, tpr);
  }
  return pts;
}

}  // namespace dablog
