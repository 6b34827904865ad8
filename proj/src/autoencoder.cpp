#include "dablog/autoencoder.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dablog {

Matrix window_onehot(const std::vector<int>& ids, int vocab_ext) {
  Matrix m(static_cast<int>(ids.size()), vocab_ext);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const int id = ids[t];
    if (id < 0 || id >= vocab_ext) throw std::out_of_range("id out of range for onehot");
    m(static_cast<int>(t), id) = 1.0;
  }
  return m;
}

DablogModel::DablogModel(const DablogConfig& cfg, int vocab_ext, std::uint64_t keyset_hash,
                         std::uint64_t init_seed)
    : cfg_(cfg),
      keyset_hash_(keyset_hash),
      embedding_(vocab_ext, cfg.embedding_dim),
      encoder_("encoder", cfg.embedding_dim, cfg.encoder_hidden, cfg.interlayer_relu),
      decoder_("decoder", cfg.encoder_hidden.back(), cfg.decoder_hidden, cfg.interlayer_relu),
      classifier_("classifier", cfg.decoder_hidden.back(), vocab_ext) {
  if (cfg.encoder_hidden.empty() || cfg.decoder_hidden.empty()) {
    throw std::invalid_argument("encoder/decoder must have at least one layer");
  }
  if (cfg.encoder_hidden.back() != cfg.decoder_hidden.front()) {
    throw std::invalid_argument("encoder code dimension must match decoder input");
  }
  Rng rng(init_seed);
  embedding_.init_params(rng);
  encoder_.init_params(rng);
  decoder_.init_params(rng);
  classifier_.init_params(rng);
}

nn::ParamList DablogModel::params() {
  nn::ParamList all = embedding_.params();
  for (nn::Param* p : encoder_.params()) all.push_back(p);
  for (nn::Param* p : decoder_.params()) all.push_back(p);
  for (nn::Param* p : classifier_.params()) all.push_back(p);
  return all;
}

Matrix DablogModel::run_forward(const std::vector<int>& ids, nn::StackCache* enc_cache,
                                nn::StackCache* dec_cache, Matrix* dec_input,
                                Matrix* dec_hidden) const {
  const int T = static_cast<int>(ids.size());
  const Matrix x_embedded = embedding_.forward(ids);
  const Matrix h_enc = encoder_.forward(x_embedded, enc_cache);
  const double* code = h_enc.row(T - 1);

  Matrix repeated(T, encoder_.out_dim());
  for (int t = 0; t < T; ++t) {
    double* row = repeated.row(t);
    for (int j = 0; j < encoder_.out_dim(); ++j) row[j] = code[j];
  }
  Matrix h_dec = decoder_.forward(repeated, dec_cache);
  Matrix probs = classifier_.forward(h_dec);
  if (dec_input) *dec_input = std::move(repeated);
  if (dec_hidden) *dec_hidden = std::move(h_dec);
  return probs;
}

Matrix DablogModel::reconstruct(const SequenceWindow& w) const {
  if (w.ids.empty()) throw std::invalid_argument("empty window");
  return run_forward(w.ids, nullptr, nullptr, nullptr, nullptr);
}

std::vector<double> DablogModel::code_of(const SequenceWindow& w) const {
  if (w.ids.empty()) throw std::invalid_argument("empty window");
  const Matrix x_embedded = embedding_.forward(w.ids);
  const Matrix h_enc = encoder_.forward(x_embedded, nullptr);
  const double* last = h_enc.row(h_enc.rows() - 1);
  return std::vector<double>(last, last + encoder_.out_dim());
}

double DablogModel::forward_backward(const SequenceWindow& w) {
  const int T = w.length();
  nn::StackCache enc_cache, dec_cache;
  Matrix dec_input, dec_hidden;
  const Matrix probs = run_forward(w.ids, &enc_cache, &dec_cache, &dec_input, &dec_hidden);

  const Matrix target = reverse(window_onehot(w.ids, vocab_ext()));
  const double loss = nn::cross_entropy_loss(target, probs);

  Matrix d_h_dec = classifier_.backward(dec_hidden, probs, target);
  Matrix d_repeated = decoder_.backward(dec_cache, d_h_dec, nullptr);

  // the repeat connector sums gradients over time into the code
  std::vector<double> d_code(encoder_.out_dim(), 0.0);
  for (int t = 0; t < T; ++t) {
    const double* row = d_repeated.row(t);
    for (int j = 0; j < encoder_.out_dim(); ++j) d_code[j] += row[j];
  }

  Matrix d_h_enc(T, encoder_.out_dim());  // zeros: loss touches the encoder only through the code
  Matrix d_embedded = encoder_.backward(enc_cache, d_h_enc, d_code.data());
  embedding_.backward(w.ids, d_embedded);
  return loss;
}

std::vector<double> DablogModel::train(const std::vector<SequenceWindow>& windows,
                                       const TrainConfig& tc) {
  if (windows.empty()) throw std::invalid_argument("no training windows");
  if (tc.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (tc.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");

  nn::ParamList ps = params();
  nn::Adam opt(ps, tc.adam);
  Rng shuffle_rng(tc.seed);

  std::vector<std::size_t> order(windows.size());
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
        epoch_loss += forward_backward(windows[order[k]]);
      }
      nn::clip_global_norm(ps, tc.grad_clip_norm);
      opt.step(ps);
      pos = end;
    }
    const double mean_loss = epoch_loss / static_cast<double>(windows.size());
    if (!std::isfinite(mean_loss)) throw std::runtime_error("training diverged to non-finite loss");
    trace.push_back(mean_loss);
  }
  return trace;
}

}  // namespace dablog
