#include "dablog/sequencer.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace dablog {

std::string to_string(Label l) { return l == Label::Normal ? "normal" : "abnormal"; }

Label label_from_string(const std::string& s) {
  if (s == "normal") return Label::Normal;
  if (s == "abnormal") return Label::Abnormal;
  throw std::invalid_argument("unknown label: " + s);
}

std::vector<Session> assemble_sessions(const std::vector<RawEventRecord>& records,
                                       const KeySet& ks, const FilepathTable& filepath_table) {
  struct Entry {
    std::int64_t ts;
    int id;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Entry>> by_session;
  for (const auto& rec : records) {
    if (rec.session_id.empty()) throw std::invalid_argument("empty session_id");
    auto [it, inserted] = by_session.try_emplace(rec.session_id);
    if (inserted) order.push_back(rec.session_id);
    const std::string key = derive_addon_key(rec.base_key, rec.attrs, ks.granularity(), filepath_table);
    int id = ks.key_id(key);
    // sessions never hold the BOS/EOS sentinels; a record spelling a
    // sentinel text is just an unknown event
    if (id == ks.bos_id() || id == ks.eos_id()) id = ks.unk_id();
    it->second.push_back(Entry{rec.ts, id});
  }

  std::vector<Session> sessions;
  sessions.reserve(order.size());
  for (const auto& sid : order) {
    auto& entries = by_session[sid];
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.ts < b.ts; });
    Session s;
    s.session_id = sid;
    s.event_ids.reserve(entries.size());
    for (const auto& e : entries) s.event_ids.push_back(e.id);
    sessions.push_back(std::move(s));
  }
  return sessions;
}

std::vector<SequenceWindow> windows(const Session& s, const KeySet& ks, int seqlen) {
  if (seqlen < 3) throw std::invalid_argument("seqlen must be >= 3");
  if (s.event_ids.empty()) throw std::invalid_argument("session has no events");

  std::vector<int> padded;
  padded.reserve(s.event_ids.size() + 2);
  padded.push_back(ks.bos_id());
  padded.insert(padded.end(), s.event_ids.begin(), s.event_ids.end());
  padded.push_back(ks.eos_id());

  const int n = static_cast<int>(padded.size());
  std::vector<SequenceWindow> out;
  if (n <= seqlen) {
    SequenceWindow w;
    w.ids = padded;
    w.session_id = s.session_id;
    w.start = 0;
    w.has_bos = true;
    w.has_eos = true;
    out.push_back(std::move(w));
    return out;
  }

  const int count = n - seqlen + 1;
  out.reserve(count);
  for (int start = 0; start < count; ++start) {
    SequenceWindow w;
    w.ids.assign(padded.begin() + start, padded.begin() + start + seqlen);
    w.session_id = s.session_id;
    w.start = start;
    w.has_bos = (start == 0);
    w.has_eos = (start == count - 1);
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace dablog
