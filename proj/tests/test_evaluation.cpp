#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dablog/evaluation.hpp"

using namespace dablog;

namespace {

// percentage-point distance
double pp(double fraction, double printed_percent) {
  return std::fabs(fraction * 100.0 - printed_percent);
}

SessionScore score_of(const std::string& sid, int worst_rank) {
  SessionScore s;
  s.session_id = sid;
  ScoredEvent ev;
  ev.position = 1;
  ev.true_id = 0;
  ev.rank = worst_rank;
  ev.prob = 0.5;
  s.events.push_back(ev);
  return s;
}

}  // namespace

TEST_CASE("confusion partitions labeled sessions") {
  LabelMap truth = {{"a", Label::Abnormal}, {"b", Label::Abnormal},
                    {"c", Label::Normal},   {"d", Label::Normal},
                    {"e", Label::Normal}};

  SUBCASE("all correct") {
    const auto c = confusion(truth, truth);
    CHECK(c.tp == 2);
    CHECK(c.tn == 3);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
    CHECK(c.total() == 5);
  }

  SUBCASE("blind model predicts all normal") {
    LabelMap blind;
    for (const auto& [sid, l] : truth) blind[sid] = Label::Normal;
    const auto c = confusion(blind, truth);
    CHECK(c.tp == 0);
    CHECK(c.fp == 0);
    CHECK(c.fn == 2);
    CHECK(c.tn == 3);
  }

  SUBCASE("one swapped normal becomes a false positive") {
    LabelMap pred = truth;
    pred["c"] = Label::Abnormal;
    const auto c = confusion(pred, truth);
    CHECK(c.fp == 1);
    CHECK(c.tp == 2);
  }

  SUBCASE("key-set mismatch throws") {
    LabelMap pred = truth;
    pred.erase("a");
    CHECK_THROWS_AS(confusion(pred, truth), std::invalid_argument);
    pred["zz"] = Label::Normal;
    CHECK_THROWS_AS(confusion(pred, truth), std::invalid_argument);
  }
}

TEST_CASE("metrics reproduce the published percentages within 0.01 points") {
  SUBCASE("short-window column") {
    const auto r = metrics(ConfusionCounts{16367, 2424, 197576, 471});
    CHECK(pp(r.fp_rate, 1.21) <= 0.01);
    CHECK(pp(r.recall, 97.20) <= 0.01);
    CHECK(pp(r.precision, 87.10) <= 0.01);
    CHECK(pp(r.f1, 91.87) <= 0.01);
    CHECK_FALSE(r.degenerate);
  }
  SUBCASE("long-window column") {
    const auto r = metrics(ConfusionCounts{14910, 1224, 198776, 1928});
    CHECK(pp(r.fp_rate, 0.61) <= 0.01);
    CHECK(pp(r.recall, 88.54) <= 0.01);
    CHECK(pp(r.precision, 92.41) <= 0.01);
    CHECK(pp(r.f1, 90.44) <= 0.01);
  }
  SUBCASE("intersection column") {
    const auto r = metrics(ConfusionCounts{14630, 1059, 198941, 2208});
    CHECK(pp(r.fp_rate, 0.52) <= 0.01);
    CHECK(pp(r.recall, 86.88) <= 0.01);
    CHECK(pp(r.precision, 93.25) <= 0.01);
    CHECK(pp(r.f1, 89.95) <= 0.01);
  }
  SUBCASE("union column") {
    const auto r = metrics(ConfusionCounts{16647, 2589, 197411, 191});
    CHECK(pp(r.fp_rate, 1.29) <= 0.01);
    CHECK(pp(r.recall, 98.86) <= 0.01);
    CHECK(pp(r.precision, 86.54) <= 0.01);
    CHECK(pp(r.f1, 92.29) <= 0.01);
  }
}

TEST_CASE("metrics flag degenerate zero denominators") {
  const auto r = metrics(ConfusionCounts{0, 0, 5, 0});
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK(r.f1 == 0.0);
  CHECK(r.degenerate);
}

TEST_CASE("perfect predictions give perfect metrics") {
  LabelMap truth = {{"a", Label::Abnormal}, {"b", Label::Normal}};
  const auto r = metrics(confusion(truth, truth));
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);
  CHECK(r.accuracy == 1.0);
  CHECK(r.fp_rate == 0.0);
}

TEST_CASE("sweep over cached scores") {
  // v_ext = 10; ranks chosen so the session flips at known thresholds
  const int v_ext = 10;
  std::vector<SessionScore> scores = {score_of("bad", 8), score_of("good", 1),
                                      score_of("mid", 3)};
  LabelMap truth = {{"bad", Label::Abnormal}, {"good", Label::Normal}, {"mid", Label::Normal}};

  SUBCASE("theta 100 marks everything normal") {
    const auto result = sweep(scores, truth, {100.0}, v_ext);
    CHECK(result[0].second.tp == 0);
    CHECK(result[0].second.fp == 0);
    CHECK(result[0].second.tn == 2);
    CHECK(result[0].second.fn == 1);
  }

  SUBCASE("TP and FP are non-increasing along the grid") {
    std::vector<double> grid;
    for (int t = 1; t <= 100; ++t) grid.push_back(t);
    const auto result = sweep(scores, truth, grid, v_ext);
    for (std::size_t i = 1; i < result.size(); ++i) {
      CHECK(result[i].second.tp <= result[i - 1].second.tp);
      CHECK(result[i].second.fp <= result[i - 1].second.fp);
    }
  }

  SUBCASE("a single grid point equals a direct evaluation") {
    const auto result = sweep(scores, truth, {30.0}, v_ext);  // N = 3
    LabelMap direct;
    for (const auto& s : scores) {
      direct[s.session_id] = s.worst_rank() > 3 ? Label::Abnormal : Label::Normal;
    }
    const auto c = confusion(direct, truth);
    CHECK(result[0].second.tp == c.tp);
    CHECK(result[0].second.fp == c.fp);
    CHECK(result[0].second.tn == c.tn);
    CHECK(result[0].second.fn == c.fn);
  }

  SUBCASE("empty or unsorted grids are rejected") {
    CHECK_THROWS_AS(sweep(scores, truth, {}, v_ext), std::invalid_argument);
    CHECK_THROWS_AS(sweep(scores, truth, {50.0, 10.0}, v_ext), std::invalid_argument);
  }
}

TEST_CASE("roc_auc") {
  SUBCASE("perfect classifier point") { CHECK(roc_auc({{0.0, 1.0}}) == doctest::Approx(1.0)); }
  SUBCASE("bare diagonal") {
    CHECK(roc_auc({{0.0, 0.0}}) == doctest::Approx(0.5));
    CHECK(roc_auc({{1.0, 1.0}}) == doctest::Approx(0.5));
  }
  SUBCASE("two-trapezoid hand integration") {
    CHECK(roc_auc({{0.2, 0.8}}) == doctest::Approx(0.8).epsilon(1e-12));
  }
  SUBCASE("duplicate points leave the area unchanged") {
    const double base = roc_auc({{0.2, 0.8}, {0.5, 0.9}});
    const double dup = roc_auc({{0.2, 0.8}, {0.5, 0.9}, {0.2, 0.8}, {0.5, 0.9}});
    CHECK(base == doctest::Approx(dup).epsilon(1e-12));
  }
  SUBCASE("out-of-range coordinates are rejected") {
    CHECK_THROWS_AS(roc_auc({{1.2, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(roc_auc({{0.5, -0.1}}), std::invalid_argument);
    CHECK_THROWS_AS(roc_auc({}), std::invalid_argument);
  }
}
