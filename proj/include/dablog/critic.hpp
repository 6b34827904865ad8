#pragma once

#include <string>
#include <vector>

#include "dablog/matrix.hpp"
#include "dablog/sequencer.hpp"

namespace dablog {

enum class CriticMode { Rank, Threshold };

struct CriticConfig {
  CriticMode mode = CriticMode::Rank;
  double theta_n = 9.0;   // percentage in (0, 100], rank mode
  double theta_p = 0.5;   // probability in (0, 1), threshold mode
  bool skip_sentinels = true;
};

struct Offence {
  int position = 0;  // index within the judged window/session
  int true_id = 0;
  int rank = 0;       // rank mode: 1-based rank of the true key
  double prob = 0.0;  // probability assigned to the true key
};

struct Verdict {
  Label label = Label::Normal;
  std::vector<Offence> offending;       // non-empty iff label == Abnormal
  std::vector<int> unk_positions;       // true key was UNK (judged normally, flagged)
};

// Number of top slots granted by a normalized percentage threshold:
// N = max(1, floor(theta_n / 100 * v_ext)).
int rank_slots(double theta_n, int v_ext);

// 1-based rank of p_row[true_id]: one plus the number of strictly larger
// entries, so equal probabilities share the better rank.
int rank_of_true(const std::vector<double>& p_row, int true_id);

// Rank criterion: normal iff the true key's probability reaches the N-th
// largest value (boundary ties count as normal).
bool event_normal_rank(const std::vector<double>& p_row, int true_id, double theta_n, int v_ext);

// Threshold criterion: normal iff p_row[true_id] >= theta_p.
bool event_normal_threshold(const std::vector<double>& p_row, int true_id, double theta_p);

// Judges one window against its reconstruction. `probs_aligned` must
// already be reversed back to input order (row t describes w.ids[t]).
// Sentinel positions are skipped when cfg.skip_sentinels is set.
Verdict judge_window_autoencoder(const Matrix& probs_aligned, const SequenceWindow& w,
                                 const KeySet& ks, const CriticConfig& cfg);

// A session is abnormal iff any of its window verdicts is abnormal.
// Offences are merged; positions stay window-relative in each entry.
Verdict judge_session(const std::vector<Verdict>& window_verdicts);

enum class MergeMode { Intersection, Union };

// Hybrid label merge: intersection is abnormal only when both are,
// union when either is.
Label merge_labels(Label a, Label b, MergeMode mode);

}  // namespace dablog
