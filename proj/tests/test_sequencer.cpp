#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dablog/rng.hpp"
#include "dablog/sequencer.hpp"

using namespace dablog;

namespace {

KeySet test_keys(int v) {
  std::vector<std::string> keys;
  for (int i = 0; i < v; ++i) keys.push_back("k" + std::to_string(i));
  return KeySet::from_keys(std::move(keys), Granularity::K0);
}

Session session_of(int n, const std::string& sid = "s") {
  Session s;
  s.session_id = sid;
  for (int i = 0; i < n; ++i) s.event_ids.push_back(i % 3);
  return s;
}

}  // namespace

TEST_CASE("assemble_sessions partitions by id and orders by timestamp") {
  const KeySet ks = test_keys(3);
  std::vector<RawEventRecord> records = {
      {"a", 2, "k0", {}}, {"b", 1, "k1", {}}, {"a", 1, "k2", {}}, {"b", 2, "k0", {}}};
  const auto sessions = assemble_sessions(records, ks);
  REQUIRE(sessions.size() == 2);
  CHECK(sessions[0].session_id == "a");  // first-occurrence order
  CHECK(sessions[0].event_ids == std::vector<int>{2, 0});
  CHECK(sessions[1].session_id == "b");
  CHECK(sessions[1].event_ids == std::vector<int>{1, 0});
}

TEST_CASE("assemble_sessions keeps input order on timestamp ties") {
  const KeySet ks = test_keys(3);
  std::vector<RawEventRecord> records = {
      {"a", 7, "k0", {}}, {"a", 7, "k1", {}}, {"a", 7, "k2", {}}, {"a", 3, "k1", {}}};
  const auto sessions = assemble_sessions(records, ks);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].event_ids == std::vector<int>{1, 0, 1, 2});
}

TEST_CASE("assemble_sessions maps unseen keys to UNK") {
  const KeySet ks = test_keys(2);
  std::vector<RawEventRecord> records = {{"a", 0, "mystery", {}}};
  const auto sessions = assemble_sessions(records, ks);
  CHECK(sessions[0].event_ids == std::vector<int>{ks.unk_id()});
}

TEST_CASE("windows: short session yields one sentinel-padded window") {
  const KeySet ks = test_keys(3);
  const auto w = windows(session_of(3), ks, 10);
  REQUIRE(w.size() == 1);
  CHECK(w[0].length() == 5);
  CHECK(w[0].ids.front() == ks.bos_id());
  CHECK(w[0].ids.back() == ks.eos_id());
  CHECK(w[0].has_bos);
  CHECK(w[0].has_eos);
}

TEST_CASE("windows: 12 events at seqlen 10 slide into 5 windows") {
  const KeySet ks = test_keys(3);
  const Session s = session_of(12);
  const auto w = windows(s, ks, 10);
  // padded length 14 -> 14 - 10 + 1
  REQUIRE(w.size() == 5);
  for (const auto& win : w) CHECK(win.length() == 10);
  CHECK(w[0].ids.front() == ks.bos_id());
  CHECK(w[4].ids.back() == ks.eos_id());
  // hand-enumerated first and last windows
  std::vector<int> first = {ks.bos_id()};
  for (int i = 0; i < 9; ++i) first.push_back(s.event_ids[i]);
  CHECK(w[0].ids == first);
  std::vector<int> last(s.event_ids.begin() + 3, s.event_ids.end());
  last.push_back(ks.eos_id());
  CHECK(w[4].ids == last);
}

TEST_CASE("windows: 8 events at seqlen 10 is an exact fit") {
  const KeySet ks = test_keys(3);
  const auto w = windows(session_of(8), ks, 10);
  REQUIRE(w.size() == 1);
  CHECK(w[0].length() == 10);
}

TEST_CASE("windows: seqlen below 3 is rejected") {
  const KeySet ks = test_keys(3);
  CHECK_THROWS_AS(windows(session_of(3), ks, 2), std::invalid_argument);
}

TEST_CASE("window properties: coverage, overlap, count, sentinel discipline") {
  const KeySet ks = test_keys(3);
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(30));
    const int seqlen = 3 + static_cast<int>(rng.next_below(12));
    const Session s = session_of(n);
    const auto w = windows(s, ks, seqlen);
    const int padded = n + 2;
    const std::size_t expected = static_cast<std::size_t>(std::max(1, padded - seqlen + 1));
    CHECK(w.size() == expected);

    std::vector<int> covered(padded, 0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (int t = 0; t < w[i].length(); ++t) {
        ++covered[w[i].start + t];
        const int id = w[i].ids[t];
        if (id == ks.bos_id()) {
          CHECK(i == 0);
          CHECK(t == 0);
        }
        if (id == ks.eos_id()) {
          CHECK(i == w.size() - 1);
          CHECK(t == w[i].length() - 1);
        }
      }
      if (i > 0 && w.size() > 1) {
        // adjacent windows overlap in seqlen - 1 positions
        CHECK(w[i].start == w[i - 1].start + 1);
      }
    }
    for (int c : covered) CHECK(c >= 1);
  }
}

TEST_CASE("reverse reverses rows and is an involution") {
  Matrix m(3, 2);
  m(0, 0) = 1;
  m(1, 0) = 2;
  m(2, 0) = 3;
  const Matrix r = reverse(m);
  CHECK(r(0, 0) == 3);
  CHECK(r(1, 0) == 2);
  CHECK(r(2, 0) == 1);

  Matrix single(1, 4);
  single(0, 2) = 9;
  const Matrix rs = reverse(single);
  CHECK(rs(0, 2) == 9);

  Rng rng(3);
  Matrix random(7, 5);
  for (double& v : random.data()) v = rng.uniform(-1, 1);
  const Matrix twice = reverse(reverse(random));
  CHECK(twice.data() == random.data());
}

TEST_CASE("sentinel-text records become unknown events, never sentinels") {
  const KeySet ks = test_keys(2);
  std::vector<RawEventRecord> records = {
      {"a", 0, kBosText, {}}, {"a", 1, "k0", {}}, {"a", 2, kEosText, {}}};
  const auto sessions = assemble_sessions(records, ks);
  CHECK(sessions[0].event_ids == std::vector<int>{ks.unk_id(), 0, ks.unk_id()});
}
