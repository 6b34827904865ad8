#pragma once

#include <string>
#include <vector>

#include "dablog/matrix.hpp"
#include "dablog/nn/param.hpp"
#include "dablog/rng.hpp"

namespace dablog::nn {

// Per-step activations cached by a forward pass for use in BPTT.
struct LstmCache {
  Matrix x;      // T x in_dim
  Matrix gi, gf, go, gg;  // gate activations, T x hidden
  Matrix c;      // cell states, T x hidden
  Matrix tc;     // tanh(c), T x hidden
  Matrix h;      // hidden states, T x hidden
};

// Vanilla LSTM layer over row-vector sequences:
//   i = sigmoid(x Wi + h_prev Ui + bi)      f = sigmoid(x Wf + h_prev Uf + bf)
//   o = sigmoid(x Wo + h_prev Uo + bo)      g = tanh   (x Wg + h_prev Ug + bg)
//   c = f*c_prev + i*g                      h = o*tanh(c)
// States start at zero; parameters are stored per gate.
class LstmLayer {
 public:
  LstmLayer(std::string name, int in_dim, int hidden);

  int in_dim() const { return in_dim_; }
  int hidden() const { return hidden_; }

  void init_params(Rng& rng);
  ParamList params();

  // Single step. h_prev/c_prev/h/c all have `hidden` entries; x has `in_dim`.
  void cell_forward(const double* x, const double* h_prev, const double* c_prev,
                    double* h, double* c) const;

  // Full sequence from zero state. Returns H (T x hidden); fills `cache`
  // when non-null so backward() can run. Inference passes nullptr.
  Matrix forward(const Matrix& x, LstmCache* cache) const;

  // BPTT. d_h is the upstream gradient on every row of H; d_hT/d_cT are
  // extra gradients on the final hidden/cell state (nullable). Accumulates
  // parameter gradients and returns the gradient w.r.t. the input sequence.
  Matrix backward(const LstmCache& cache, const Matrix& d_h,
                  const double* d_hT, const double* d_cT);

  Param wi, wf, wo, wg;  // in_dim x hidden
  Param ui, uf, uo, ug;  // hidden x hidden
  Param bi, bf, bo, bg;  // 1 x hidden

 private:
  int in_dim_;
  int hidden_;
};

struct StackCache {
  std::vector<LstmCache> layers;
  // Input fed to each layer; inputs[0] is the original sequence, the rest
  // are the (optionally ReLU-gated) outputs of the previous layer.
  std::vector<Matrix> inputs;
};

// Final (h, c) of one layer after a forward pass.
struct LayerState {
  std::vector<double> h;
  std::vector<double> c;
};

// Stacked LSTM layers. When interlayer_relu is set, the hidden-state stream
// feeding each *next* layer passes through ReLU; gate internals and the top
// layer's returned states stay standard.
class LstmStack {
 public:
  LstmStack() = default;
  LstmStack(const std::string& name, int in_dim, const std::vector<int>& hidden_sizes,
            bool interlayer_relu);

  int in_dim() const;
  int out_dim() const;
  std::size_t depth() const { return layers_.size(); }
  bool interlayer_relu() const { return interlayer_relu_; }

  void init_params(Rng& rng);
  ParamList params();
  LstmLayer& layer(std::size_t i) { return layers_[i]; }
  const LstmLayer& layer(std::size_t i) const { return layers_[i]; }

  // Returns top-layer H (T x out_dim). Fills cache when non-null.
  Matrix forward(const Matrix& x, StackCache* cache) const;

  // Final (h, c) per layer from a cached forward pass.
  std::vector<LayerState> final_states(const StackCache& cache) const;

  // d_h_top: gradient on top-layer H rows. d_hT_top: extra gradient on the
  // top layer's final hidden state (nullable). Returns gradient w.r.t. the
  // stack input.
  Matrix backward(const StackCache& cache, const Matrix& d_h_top, const double* d_hT_top);

 private:
  std::vector<LstmLayer> layers_;
  bool interlayer_relu_ = true;
};

}  // namespace dablog::nn
