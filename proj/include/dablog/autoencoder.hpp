#pragma once

#include <cstdint>
#include <vector>

#include "dablog/keyset.hpp"
#include "dablog/matrix.hpp"
#include "dablog/nn/adam.hpp"
#include "dablog/nn/dense.hpp"
#include "dablog/nn/embedding.hpp"
#include "dablog/nn/lstm.hpp"
#include "dablog/sequencer.hpp"

namespace dablog {

struct DablogConfig {
  int seqlen = 10;
  int embedding_dim = 32;
  std::vector<int> encoder_hidden{64, 32};
  std::vector<int> decoder_hidden{32, 64};
  bool interlayer_relu = true;
};

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  std::uint64_t seed = 1;
  nn::AdamConfig adam;
  double grad_clip_norm = 5.0;  // <= 0 disables clipping
};

// Embed-encode-decode-classify reconstruction model. The decoder is
// unconditional: its input at every step is the repeated representation
// code (the encoder top layer's final hidden state).
class DablogModel {
 public:
  DablogModel(const DablogConfig& cfg, int vocab_ext, std::uint64_t keyset_hash,
              std::uint64_t init_seed);

  const DablogConfig& config() const { return cfg_; }
  int vocab_ext() const { return classifier_.out_dim(); }
  int code_dim() const { return encoder_.out_dim(); }
  std::uint64_t keyset_hash() const { return keyset_hash_; }

  // Per-position distributions for the window, in REVERSE order relative
  // to the input: row tau describes event e_{T-tau+1}. Align with
  // reverse() before comparing against the window.
  Matrix reconstruct(const SequenceWindow& w) const;

  // Encoder representation of the window (code dimension vector).
  std::vector<double> code_of(const SequenceWindow& w) const;

  // Mini-batch Adam training against reverse(onehot(window)) targets.
  // Returns the per-epoch mean window loss (cross-entropy summed over
  // positions, averaged over windows).
  std::vector<double> train(const std::vector<SequenceWindow>& windows, const TrainConfig& tc);

  // Forward + backward for one window; accumulates parameter gradients
  // and returns the window loss.
  double forward_backward(const SequenceWindow& w);

  nn::ParamList params();
  nn::Embedding& embedding() { return embedding_; }
  nn::LstmStack& encoder() { return encoder_; }
  nn::LstmStack& decoder() { return decoder_; }
  nn::DenseSoftmax& classifier() { return classifier_; }

 private:
  Matrix run_forward(const std::vector<int>& ids, nn::StackCache* enc_cache,
                     nn::StackCache* dec_cache, Matrix* dec_input, Matrix* dec_hidden) const;

  DablogConfig cfg_;
  std::uint64_t keyset_hash_;
  nn::Embedding embedding_;
  nn::LstmStack encoder_;
  nn::LstmStack decoder_;
  nn::DenseSoftmax classifier_;
};

// One-hot target for a window over the extended vocabulary.
Matrix window_onehot(const std::vector<int>& ids, int vocab_ext);

}  // namespace dablog
