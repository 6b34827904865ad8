#include "dablog/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dablog {

std::vector<PredictionPair> prediction_pairs(const Session& s, const KeySet& ks, int seqlen) {
  if (seqlen < 3) throw std::invalid_argument("seqlen must be >= 3");
  std::vector<int> padded;
  padded.reserve(s.event_ids.size() + 2);
  padded.push_back(ks.bos_id());
  padded.insert(padded.end(), s.event_ids.begin(), s.event_ids.end());
  padded.push_back(ks.eos_id());

  std::vector<PredictionPair> pairs;
  pairs.reserve(padded.size() - 1);
  for (std::size_t t = 1; t < padded.size(); ++t) {
    PredictionPair p;
    const std::size_t begin = t > static_cast<std::size_t>(seqlen) ? t - seqlen : 0;
    p.prefix.assign(padded.begin() + begin, padded.begin() + t);
    p.target = padded[t];
    pairs.push_back(std::move(p));
  }
  return pairs;
}

BaselineModel::BaselineModel(const BaselineConfig& cfg, int vocab_ext, std::uint64_t keyset_hash,
                             std::uint64_t init_seed)
    : cfg_(cfg),
      keyset_hash_(keyset_hash),
      embedding_(vocab_ext, cfg.embedding_dim),
      stack_("lstm", cfg.embedding_dim, cfg.hidden, cfg.interlayer_relu),
      classifier_("classifier", cfg.hidden.back(), vocab_ext) {
  Rng rng(init_seed);
  embedding_.init_params(rng);
  stack_.init_params(rng);
  classifier_.init_params(rng);
}

nn::ParamList BaselineModel::params() {
  nn::ParamList all = embedding_.params();
  for (nn::Param* p : stack_.params()) all.push_back(p);
  for (nn::Param* p : classifier_.params()) all.push_back(p);
  return all;
}

std::vector<double> BaselineModel::predict_next(const std::vector<int>& prefix_ids) const {
  if (prefix_ids.empty()) throw std::invalid_argument("empty prefix");
  const Matrix x_embedded = embedding_.forward(prefix_ids);
  const Matrix h = stack_.forward(x_embedded, nullptr);
  Matrix last(1, stack_.out_dim());
  const double* src = h.row(h.rows() - 1);
  for (int j = 0; j < stack_.out_dim(); ++j) last(0, j) = src[j];
  const Matrix probs = classifier_.forward(last);
  return std::vector<double>(probs.row(0), probs.row(0) + probs.cols());
}

double BaselineModel::forward_backward(const PredictionPair& pair) {
  const int L = static_cast<int>(pair.prefix.size());
  nn::StackCache cache;
  const Matrix x_embedded = embedding_.forward(pair.prefix);
  const Matrix h = stack_.forward(x_embedded, &cache);

  Matrix last(1, stack_.out_dim());
  for (int j = 0; j < stack_.out_dim(); ++j) last(0, j) = h(L - 1, j);
  const Matrix probs = classifier_.forward(last);
  const Matrix target = window_onehot({pair.target}, vocab_ext());
  const double loss = nn::cross_entropy_loss(target, probs);

  const Matrix d_last = classifier_.backward(last, probs, target);
  Matrix d_h(L, stack_.out_dim());  // gradient enters only at the final step
  for (int j = 0; j < stack_.out_dim(); ++j) d_h(L - 1, j) = d_last(0, j);
  const Matrix d_embedded = stack_.backward(cache, d_h, nullptr);
  embedding_.backward(pair.prefix, d_embedded);
  return loss;
}

std::vector<double> BaselineModel::train(const std::vector<PredictionPair>& pairs,
                                         const TrainConfig& tc) {
  if (pairs.empty()) throw std::invalid_argument("no training pairs");
  if (tc.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (tc.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");

  nn::ParamList ps = params();
  nn::Adam opt(ps, tc.adam);
  Rng shuffle_rng(tc.seed);

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> trace;
  trace.reserve(tc.epochs);
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t pos = 0;
    while (pos < order.size()) {
      const std::size_t end = std::min(pos + static_cast<std::size_t>(tc.batch_size), order.size());
      nn::zero_grads(ps);
      for (std::size_t k = pos; k < end; ++k) {
        epoch_loss += forward_backward(pairs[order[k]]);
      }
      nn::clip_global_norm(ps, tc.grad_clip_norm);
      opt.step(ps);
      pos = end;
    }
    const double mean_loss = epoch_loss / static_cast<double>(pairs.size());
    if (!std::isfinite(mean_loss)) throw std::runtime_error("training diverged to non-finite loss");
    trace.push_back(mean_loss);
  }
  return trace;
}

FrequencyModel FrequencyModel::from_counts(std::vector<std::int64_t> counts) {
  FrequencyModel fm;
  fm.counts_ = std::move(counts);
  const int v = static_cast<int>(fm.counts_.size());
  std::vector<int> ids(v);
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&fm](int a, int b) {
    if (fm.counts_[a] != fm.counts_[b]) return fm.counts_[a] > fm.counts_[b];
    return a < b;
  });
  fm.rank_of_id_.assign(v, 0);
  for (int r = 0; r < v; ++r) fm.rank_of_id_[ids[r]] = r + 1;
  return fm;
}

FrequencyModel FrequencyModel::fit(const std::vector<Session>& sessions, const KeySet& ks) {
  std::vector<std::int64_t> counts(ks.vocab_size(), 0);
  for (const auto& s : sessions) {
    for (int id : s.event_ids) {
      if (id >= 0 && id < ks.vocab_size()) ++counts[id];
    }
  }
  return from_counts(std::move(counts));
}

int FrequencyModel::rank(int id) const {
  if (id < 0 || id >= vocab_size()) throw std::out_of_range("rank of a reserved or invalid id");
  return rank_of_id_[id];
}

}  // namespace dablog
