#include "dablog/critic.hpp"

#include <cmath>
#include <stdexcept>

namespace dablog {

int rank_slots(double theta_n, int v_ext) {
  if (theta_n <= 0.0 || theta_n > 100.0) throw std::invalid_argument("theta_n outside (0, 100]");
  const int n = static_cast<int>(std::floor(theta_n / 100.0 * v_ext));
  return n < 1 ? 1 : n;
}

int rank_of_true(const std::vector<double>& p_row, int true_id) {
  if (true_id < 0 || static_cast<std::size_t>(true_id) >= p_row.size()) {
    throw std::out_of_range("true id out of range");
  }
  const double p_true = p_row[true_id];
  int greater = 0;
  for (double p : p_row) {
    if (p > p_true) ++greater;
  }
  return greater + 1;
}

bool event_normal_rank(const std::vector<double>& p_row, int true_id, double theta_n, int v_ext) {
  return rank_of_true(p_row, true_id) <= rank_slots(theta_n, v_ext);
}

bool event_normal_threshold(const std::vector<double>& p_row, int true_id, double theta_p) {
  if (theta_p <= 0.0 || theta_p >= 1.0) throw std::invalid_argument("theta_p outside (0, 1)");
  if (true_id < 0 || static_cast<std::size_t>(true_id) >= p_row.size()) {
    throw std::out_of_range("true id out of range");
  }
  return p_row[true_id] >= theta_p;
}

Verdict judge_window_autoencoder(const Matrix& probs_aligned, const SequenceWindow& w,
                                 const KeySet& ks, const CriticConfig& cfg) {
  if (probs_aligned.rows() != w.length()) {
    throw std::invalid_argument("probability rows do not match window length");
  }
  const int v_ext = probs_aligned.cols();
  Verdict verdict;
  for (int t = 0; t < w.length(); ++t) {
    const int id = w.ids[t];
    const bool sentinel = (id == ks.bos_id() || id == ks.eos_id());
    if (sentinel && cfg.skip_sentinels) continue;
    if (id == ks.unk_id()) verdict.unk_positions.push_back(t);
    std::vector<double> row(probs_aligned.row(t), probs_aligned.row(t) + v_ext);
    bool normal;
    Offence off;
    off.position = t;
    off.true_id = id;
    off.prob = row[id];
    if (cfg.mode == CriticMode::Rank) {
      off.rank = rank_of_true(row, id);
      normal = off.rank <= rank_slots(cfg.theta_n, v_ext);
    } else {
      off.rank = rank_of_true(row, id);
      normal = event_normal_threshold(row, id, cfg.theta_p);
    }
    if (!normal) verdict.offending.push_back(off);
  }
  verdict.label = verdict.offending.empty() ? Label::Normal : Label::Abnormal;
  return verdict;
}

Verdict judge_session(const std::vector<Verdict>& window_verdicts) {
  if (window_verdicts.empty()) throw std::invalid_argument("no window verdicts");
  Verdict out;
  for (const auto& v : window_verdicts) {
    for (const auto& off : v.offending) out.offending.push_back(off);
    for (int p : v.unk_positions) out.unk_positions.push_back(p);
  }
  out.label = out.offending.empty() ? Label::Normal : Label::Abnormal;
  return out;
}

Label merge_labels(Label a, Label b, MergeMode mode) {
  const bool abnormal = mode == MergeMode::Intersection
                            ? (a == Label::Abnormal && b == Label::Abnormal)
                            : (a == Label::Abnormal || b == Label::Abnormal);
  return abnormal ? Label::Abnormal : Label::Normal;
}

}  // namespace dablog
