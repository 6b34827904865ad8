#include "dablog/detector.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace dablog {

int SessionScore::worst_rank() const {
  int worst = 0;
  for (const auto& e : events) worst = std::max(worst, e.rank);
  return worst;
}

double SessionScore::min_prob() const {
  double lo = 1.0;
  for (const auto& e : events) lo = std::min(lo, e.prob);
  return lo;
}

std::vector<SessionScore> score_sessions(const DablogModel& model,
                                         const std::vector<Session>& sessions, const KeySet& ks,
                                         bool skip_sentinels) {
  const int v_ext = model.vocab_ext();
  std::vector<SessionScore> out;
  out.reserve(sessions.size());
  for (const auto& s : sessions) {
    SessionScore score;
    score.session_id = s.session_id;
    for (const auto& w : windows(s, ks, model.config().seqlen)) {
      const Matrix probs = reverse(model.reconstruct(w));
      for (int t = 0; t < w.length(); ++t) {
        const int id = w.ids[t];
        if (skip_sentinels && (id == ks.bos_id() || id == ks.eos_id())) continue;
        std::vector<double> row(probs.row(t), probs.row(t) + v_ext);
        ScoredEvent ev;
        ev.position = w.start + t;
        ev.true_id = id;
        ev.rank = rank_of_true(row, id);
        ev.prob = row[id];
        ev.unk = (id == ks.unk_id());
        score.events.push_back(ev);
      }
    }
    out.push_back(std::move(score));
  }
  return out;
}

std::vector<SessionScore> score_sessions(const BaselineModel& model,
                                         const std::vector<Session>& sessions, const KeySet& ks,
                                         bool skip_sentinels) {
  std::vector<SessionScore> out;
  out.reserve(sessions.size());
  for (const auto& s : sessions) {
    SessionScore score;
    score.session_id = s.session_id;
    const auto pairs = prediction_pairs(s, ks, model.config().seqlen);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const int id = pairs[k].target;
      if (skip_sentinels && (id == ks.bos_id() || id == ks.eos_id())) continue;
      const std::vector<double> row = model.predict_next(pairs[k].prefix);
      ScoredEvent ev;
      ev.position = static_cast<int>(k) + 1;  // target index within the padded session
      ev.true_id = id;
      ev.rank = rank_of_true(row, id);
      ev.prob = row[id];
      ev.unk = (id == ks.unk_id());
      score.events.push_back(ev);
    }
    out.push_back(std::move(score));
  }
  return out;
}

std::vector<SessionScore> score_sessions(const FrequencyModel& model,
                                         const std::vector<Session>& sessions, const KeySet& ks) {
  const int v_ext = ks.extended_size();
  std::vector<SessionScore> out;
  out.reserve(sessions.size());
  std::int64_t total = 0;
  for (std::int64_t c : model.counts()) total += c;
  for (const auto& s : sessions) {
    SessionScore score;
    score.session_id = s.session_id;
    for (std::size_t t = 0; t < s.event_ids.size(); ++t) {
      const int id = s.event_ids[t];
      ScoredEvent ev;
      ev.position = static_cast<int>(t) + 1;  // account for BOS at 0
      ev.true_id = id;
      ev.unk = (id >= ks.vocab_size());
      ev.rank = ev.unk ? v_ext : model.rank(id);
      ev.prob = (ev.unk || total == 0) ? 0.0
                                       : static_cast<double>(model.counts()[id]) / total;
      score.events.push_back(ev);
    }
    out.push_back(std::move(score));
  }
  return out;
}

Verdict verdict_from_score(const SessionScore& score, const CriticConfig& cfg, int v_ext) {
  Verdict verdict;
  std::map<int, Offence> worst_by_pos;
  for (const auto& ev : score.events) {
    if (ev.unk) verdict.unk_positions.push_back(ev.position);
    bool normal;
    if (cfg.mode == CriticMode::Rank) {
      normal = ev.rank <= rank_slots(cfg.theta_n, v_ext);
    } else {
      if (cfg.theta_p <= 0.0 || cfg.theta_p >= 1.0) {
        throw std::invalid_argument("theta_p outside (0, 1)");
      }
      normal = ev.prob >= cfg.theta_p;
    }
    if (normal) continue;
    auto it = worst_by_pos.find(ev.position);
    if (it == worst_by_pos.end() || ev.rank > it->second.rank) {
      worst_by_pos[ev.position] = Offence{ev.position, ev.true_id, ev.rank, ev.prob};
    }
  }
  // UNK list may contain one entry per covering window; deduplicate
  std::sort(verdict.unk_positions.begin(), verdict.unk_positions.end());
  verdict.unk_positions.erase(
      std::unique(verdict.unk_positions.begin(), verdict.unk_positions.end()),
      verdict.unk_positions.end());
  for (auto& [pos, off] : worst_by_pos) verdict.offending.push_back(off);
  verdict.label = verdict.offending.empty() ? Label::Normal : Label::Abnormal;
  return verdict;
}

}  // namespace dablog
