#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "dablog/critic.hpp"
#include "dablog/evaluation.hpp"
#include "dablog/rng.hpp"

using namespace dablog;

namespace {

// Distribution with known ranks: entry i has probability proportional to
// size - i, so id 0 has rank 1, id 1 rank 2, ...
std::vector<double> ranked_row(int size) {
  std::vector<double> row(size);
  double total = 0.0;
  for (int i = 0; i < size; ++i) total += size - i;
  for (int i = 0; i < size; ++i) row[i] = (size - i) / total;
  return row;
}

}  // namespace

TEST_CASE("rank_slots floors the normalized threshold") {
  CHECK(rank_slots(9.0, 101) == 9);    // floor(9.09)
  CHECK(rank_slots(31.0, 31) == 9);    // floor(9.61)
  CHECK(rank_slots(7.5, 104) == 7);
  CHECK(rank_slots(0.5, 31) == 1);     // never below 1
  CHECK(rank_slots(100.0, 31) == 31);
  CHECK_THROWS_AS(rank_slots(0.0, 31), std::invalid_argument);
  CHECK_THROWS_AS(rank_slots(101.0, 31), std::invalid_argument);
}

TEST_CASE("rank criterion: 64th of 101 misses top-9%") {
  const auto row = ranked_row(101);
  CHECK_FALSE(event_normal_rank(row, 63, 9.0, 101));  // rank 64
  CHECK(event_normal_rank(row, 8, 9.0, 101));         // rank 9, boundary
  CHECK_FALSE(event_normal_rank(row, 9, 9.0, 101));   // rank 10
}

TEST_CASE("rank criterion: the most likely key is normal at any theta") {
  const auto row = ranked_row(31);
  for (double theta : {1.0, 3.0, 9.0, 50.0, 100.0}) {
    CHECK(event_normal_rank(row, 0, theta, 31));
  }
}

TEST_CASE("rank criterion: all-equal probabilities are normal at any N") {
  std::vector<double> row(10, 0.1);
  for (int id = 0; id < 10; ++id) {
    CHECK(event_normal_rank(row, id, 10.0, 10));  // N = 1, everything ties at rank 1
  }
}

TEST_CASE("rank criterion rejects an out-of-range id") {
  CHECK_THROWS_AS(event_normal_rank(ranked_row(5), 5, 10.0, 5), std::out_of_range);
}

TEST_CASE("threshold criterion") {
  std::vector<double> row = {0.9, 0.1, 0.0};
  CHECK(event_normal_threshold(row, 0, 0.5));
  CHECK_FALSE(event_normal_threshold(row, 2, 0.001));
  // boundary counts as normal
  CHECK(event_normal_threshold(row, 1, 0.1));
  CHECK_THROWS_AS(event_normal_threshold(row, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(event_normal_threshold(row, 0, 1.0), std::invalid_argument);
}

TEST_CASE("judge_window_autoencoder applies the any-abnormal rule") {
  const KeySet ks = KeySet::from_keys({"a", "b", "c"}, Granularity::K0);
  // window [BOS, a, b, EOS]
  SequenceWindow w;
  w.ids = {ks.bos_id(), 0, 1, ks.eos_id()};
  w.has_bos = w.has_eos = true;

  CriticConfig cfg;
  cfg.theta_n = 35.0;  // N = floor(0.35 * 6) = 2

  Matrix probs(4, ks.extended_size());
  // rows for BOS/EOS are irrelevant when sentinels are skipped
  auto set_row = [&probs](int r, std::vector<double> vals) {
    for (std::size_t c = 0; c < vals.size(); ++c) probs(r, static_cast<int>(c)) = vals[c];
  };
  set_row(0, {0.1, 0.1, 0.1, 0.6, 0.05, 0.05});

  SUBCASE("all positions pass") {
    set_row(1, {0.7, 0.2, 0.1, 0.0, 0.0, 0.0});   // a at rank 1
    set_row(2, {0.3, 0.35, 0.05, 0.1, 0.1, 0.1}); // b at rank 2
    set_row(3, {0.9, 0.1, 0.0, 0.0, 0.0, 0.0});
    const Verdict v = judge_window_autoencoder(probs, w, ks, cfg);
    CHECK(v.label == Label::Normal);
    CHECK(v.offending.empty());
  }

  SUBCASE("one failing position flips the window") {
    set_row(1, {0.7, 0.2, 0.1, 0.0, 0.0, 0.0});
    set_row(2, {0.5, 0.05, 0.3, 0.1, 0.03, 0.02});  // b at rank 4 of 6
    set_row(3, {0.9, 0.1, 0.0, 0.0, 0.0, 0.0});
    const Verdict v = judge_window_autoencoder(probs, w, ks, cfg);
    CHECK(v.label == Label::Abnormal);
    REQUIRE(v.offending.size() == 1);
    CHECK(v.offending[0].position == 2);
    CHECK(v.offending[0].true_id == 1);
    CHECK(v.offending[0].rank == 4);
  }

  SUBCASE("length mismatch throws") {
    Matrix bad(3, ks.extended_size());
    CHECK_THROWS_AS(judge_window_autoencoder(bad, w, ks, cfg), std::invalid_argument);
  }

  SUBCASE("UNK events are judged by rank and flagged") {
    SequenceWindow wu;
    wu.ids = {ks.bos_id(), ks.unk_id(), ks.eos_id()};
    Matrix pu(3, ks.extended_size());
    for (int r = 0; r < 3; ++r) {
      pu(r, 0) = 0.5;
      pu(r, 1) = 0.2;
      pu(r, 2) = 0.15;
      pu(r, 3) = 0.1;
      pu(r, 4) = 0.04;
      pu(r, ks.unk_id()) = 0.01;
    }
    const Verdict v = judge_window_autoencoder(pu, wu, ks, cfg);
    CHECK(v.unk_positions == std::vector<int>{1});
    CHECK(v.label == Label::Abnormal);  // rank 6 of 6 misses N=2
  }
}

TEST_CASE("judge_session lifts the any rule over windows") {
  Verdict normal;
  normal.label = Label::Normal;
  Verdict abnormal;
  abnormal.label = Label::Abnormal;
  abnormal.offending.push_back(Offence{3, 1, 7, 0.001});

  CHECK(judge_session({normal, normal}).label == Label::Normal);
  CHECK(judge_session({normal, abnormal}).label == Label::Abnormal);
  // several abnormal windows in one session
  const Verdict v = judge_session({normal, abnormal, abnormal, abnormal, abnormal});
  CHECK(v.label == Label::Abnormal);
  CHECK(v.offending.size() == 4);
  CHECK_THROWS_AS(judge_session({}), std::invalid_argument);
}

TEST_CASE("merge_labels") {
  CHECK(merge_labels(Label::Abnormal, Label::Normal, MergeMode::Intersection) == Label::Normal);
  CHECK(merge_labels(Label::Abnormal, Label::Normal, MergeMode::Union) == Label::Abnormal);
  CHECK(merge_labels(Label::Abnormal, Label::Abnormal, MergeMode::Intersection) == Label::Abnormal);
  CHECK(merge_labels(Label::Normal, Label::Normal, MergeMode::Union) == Label::Normal);
}

TEST_CASE("hybrid merge set algebra over enumerated labelings") {
  // enumerate all joint labelings of a few sessions and check
  // FP(intersection) <= min(FP_a, FP_b) and FN(union) <= min(FN_a, FN_b)
  const int n = 4;
  for (int truth_bits = 0; truth_bits < (1 << n); ++truth_bits) {
    for (int a_bits = 0; a_bits < (1 << n); ++a_bits) {
      for (int b_bits = 0; b_bits < (1 << n); ++b_bits) {
        LabelMap truth, a, b, inter, uni;
        for (int i = 0; i < n; ++i) {
          const std::string sid = "s" + std::to_string(i);
          truth[sid] = (truth_bits >> i) & 1 ? Label::Abnormal : Label::Normal;
          a[sid] = (a_bits >> i) & 1 ? Label::Abnormal : Label::Normal;
          b[sid] = (b_bits >> i) & 1 ? Label::Abnormal : Label::Normal;
          inter[sid] = merge_labels(a[sid], b[sid], MergeMode::Intersection);
          uni[sid] = merge_labels(a[sid], b[sid], MergeMode::Union);
        }
        const auto ca = confusion(a, truth);
        const auto cb = confusion(b, truth);
        const auto ci = confusion(inter, truth);
        const auto cu = confusion(uni, truth);
        CHECK(ci.fp <= std::min(ca.fp, cb.fp));
        CHECK(cu.fn <= std::min(ca.fn, cb.fn));
      }
    }
  }
}

TEST_CASE("rank criterion is monotone in theta") {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int v_ext = 5 + static_cast<int>(rng.next_below(30));
    std::vector<double> row(v_ext);
    double total = 0.0;
    for (double& p : row) {
      p = rng.next_double();
      total += p;
    }
    for (double& p : row) p /= total;
    const int id = static_cast<int>(rng.next_below(v_ext));
    bool prev = false;
    for (int theta = 1; theta <= 100; ++theta) {
      const bool normal = event_normal_rank(row, id, theta, v_ext);
      if (prev) CHECK(normal);  // once normal, stays normal as N grows
      prev = normal;
    }
    CHECK(event_normal_rank(row, id, 100.0, v_ext));  // everything normal at 100%
  }
}
