#pragma once

#include <string>
#include <vector>

#include "dablog/autoencoder.hpp"
#include "dablog/critic.hpp"
#include "dablog/predictor.hpp"
#include "dablog/sequencer.hpp"

namespace dablog {

// One judged event instance. Autoencoder scoring judges each window
// position, so an event covered by several sliding windows contributes
// several instances; `position` is absolute within the padded session.
struct ScoredEvent {
  int position = 0;
  int true_id = 0;
  int rank = 0;
  double prob = 0.0;
  bool unk = false;
};

// Model output for one session, cached so that critics with many
// thresholds re-judge without re-running the model.
struct SessionScore {
  std::string session_id;
  std::vector<ScoredEvent> events;

  // Largest (worst) rank over all judged instances; 0 when nothing was judged.
  int worst_rank() const;
  double min_prob() const;
};

std::vector<SessionScore> score_sessions(const DablogModel& model,
                                         const std::vector<Session>& sessions, const KeySet& ks,
                                         bool skip_sentinels = true);

std::vector<SessionScore> score_sessions(const BaselineModel& model,
                                         const std::vector<Session>& sessions, const KeySet& ks,
                                         bool skip_sentinels = true);

// Frequency scoring: rank is the key's occurrence rank; UNK events take
// the last rank (v_ext) so that theta_N = 100% still clears everything.
std::vector<SessionScore> score_sessions(const FrequencyModel& model,
                                         const std::vector<Session>& sessions, const KeySet& ks);

// Session-level verdict from a cached score under the critic config.
// Offences are deduplicated per absolute position, keeping the worst rank.
Verdict verdict_from_score(const SessionScore& score, const CriticConfig& cfg, int v_ext);

}  // namespace dablog
