#pragma once

#include <cstdint>
#include <vector>

#include "dablog/autoencoder.hpp"
#include "dablog/keyset.hpp"
#include "dablog/nn/dense.hpp"
#include "dablog/nn/embedding.hpp"
#include "dablog/nn/lstm.hpp"
#include "dablog/sequencer.hpp"

namespace dablog {

struct BaselineConfig {
  int seqlen = 10;
  int embedding_dim = 32;
  std::vector<int> hidden{64, 64};
  bool interlayer_relu = true;
};

// One next-event training example: the sliding prefix and its successor.
struct PredictionPair {
  std::vector<int> prefix;
  int target = 0;
};

// Every position of [BOS] + events + [EOS] that has a successor yields one
// pair; the prefix keeps at most seqlen trailing events.
std::vector<PredictionPair> prediction_pairs(const Session& s, const KeySet& ks, int seqlen);

// Predictor-style baseline: stacked LSTM over the prefix, classifier over
// the next event.
class BaselineModel {
 public:
  BaselineModel(const BaselineConfig& cfg, int vocab_ext, std::uint64_t keyset_hash,
                std::uint64_t init_seed);

  const BaselineConfig& config() const { return cfg_; }
  int vocab_ext() const { return classifier_.out_dim(); }
  std::uint64_t keyset_hash() const { return keyset_hash_; }

  // Distribution over the event immediately following the prefix.
  std::vector<double> predict_next(const std::vector<int>& prefix_ids) const;

  std::vector<double> train(const std::vector<PredictionPair>& pairs, const TrainConfig& tc);

  double forward_backward(const PredictionPair& pair);

  nn::ParamList params();
  nn::Embedding& embedding() { return embedding_; }
  nn::LstmStack& stack() { return stack_; }
  nn::DenseSoftmax& classifier() { return classifier_; }

 private:
  BaselineConfig cfg_;
  std::uint64_t keyset_hash_;
  nn::Embedding embedding_;
  nn::LstmStack stack_;
  nn::DenseSoftmax classifier_;
};

// Occurrence-ranked trivial model over real keys.
class FrequencyModel {
 public:
  FrequencyModel() = default;

  // Counts real-key occurrences across the sessions' events.
  static FrequencyModel fit(const std::vector<Session>& sessions, const KeySet& ks);

  int vocab_size() const { return static_cast<int>(counts_.size()); }
  const std::vector<std::int64_t>& counts() const { return counts_; }

  // 1-based rank by descending occurrence; ties break toward the smaller
  // id. Throws on reserved ids.
  int rank(int id) const;

  static FrequencyModel from_counts(std::vector<std::int64_t> counts);

 private:
  std::vector<std::int64_t> counts_;
  std::vector<int> rank_of_id_;
};

}  // namespace dablog
