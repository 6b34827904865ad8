#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dablog/keyset.hpp"

namespace dablog {

enum class Label { Normal, Abnormal };

std::string to_string(Label l);
Label label_from_string(const std::string& s);

// Ordered events of one session id. Event ids are real keys or UNK; the
// BOS/EOS sentinels are added at windowing time, never stored here.
struct Session {
  std::string session_id;
  std::vector<int> event_ids;
  std::optional<Label> label;
};

// One model input: a slice of the sentinel-padded session.
struct SequenceWindow {
  std::vector<int> ids;
  std::string session_id;
  int start = 0;  // offset into the padded sequence
  bool has_bos = false;
  bool has_eos = false;

  int length() const { return static_cast<int>(ids.size()); }
};

// Groups records by session id (first-occurrence order) and sorts each
// session by timestamp with a stable tie-break on input order. Event ids
// come from key_id over the derived add-on keys.
std::vector<Session> assemble_sessions(const std::vector<RawEventRecord>& records,
                                       const KeySet& ks,
                                       const FilepathTable& filepath_table = {});

// Sliding windows over [BOS] + event_ids + [EOS]. A padded sequence that
// fits within seqlen yields one window; longer sequences yield stride-1
// windows of exactly seqlen. seqlen must be >= 3.
std::vector<SequenceWindow> windows(const Session& s, const KeySet& ks, int seqlen);

}  // namespace dablog
