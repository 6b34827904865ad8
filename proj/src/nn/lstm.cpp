#include "dablog/nn/lstm.hpp"

#include <cmath>
#include <stdexcept>

#include "dablog/nn/init.hpp"

namespace dablog::nn {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmLayer::LstmLayer(std::string name, int in_dim, int hidden)
    : wi(name + ".W_i", in_dim, hidden),
      wf(name + ".W_f", in_dim, hidden),
      wo(name + ".W_o", in_dim, hidden),
      wg(name + ".W_g", in_dim, hidden),
      ui(name + ".U_i", hidden, hidden),
      uf(name + ".U_f", hidden, hidden),
      uo(name + ".U_o", hidden, hidden),
      ug(name + ".U_g", hidden, hidden),
      bi(name + ".b_i", 1, hidden),
      bf(name + ".b_f", 1, hidden),
      bo(name + ".b_o", 1, hidden),
      bg(name + ".b_g", 1, hidden),
      in_dim_(in_dim),
      hidden_(hidden) {
  if (in_dim <= 0 || hidden <= 0) throw std::invalid_argument("bad lstm layer shape");
}

void LstmLayer::init_params(Rng& rng) {
  init_glorot(wi.w, rng);
  init_glorot(wf.w, rng);
  init_glorot(wo.w, rng);
  init_glorot(wg.w, rng);
  init_glorot(ui.w, rng);
  init_glorot(uf.w, rng);
  init_glorot(uo.w, rng);
  init_glorot(ug.w, rng);
  bi.w.fill(0.0);
  bf.w.fill(1.0);  // forget-gate bias starts open
  bo.w.fill(0.0);
  bg.w.fill(0.0);
}

ParamList LstmLayer::params() {
  return {&wi, &wf, &wo, &wg, &ui, &uf, &uo, &ug, &bi, &bf, &bo, &bg};
}

void LstmLayer::cell_forward(const double* x, const double* h_prev, const double* c_prev,
                             double* h, double* c) const {
  // gate preactivations start at the bias
  std::vector<double> zi(bi.w.data().begin(), bi.w.data().end());
  std::vector<double> zf(bf.w.data().begin(), bf.w.data().end());
  std::vector<double> zo(bo.w.data().begin(), bo.w.data().end());
  std::vector<double> zg(bg.w.data().begin(), bg.w.data().end());
  vec_mat_acc(x, in_dim_, wi.w, zi.data());
  vec_mat_acc(x, in_dim_, wf.w, zf.data());
  vec_mat_acc(x, in_dim_, wo.w, zo.data());
  vec_mat_acc(x, in_dim_, wg.w, zg.data());
  vec_mat_acc(h_prev, hidden_, ui.w, zi.data());
  vec_mat_acc(h_prev, hidden_, uf.w, zf.data());
  vec_mat_acc(h_prev, hidden_, uo.w, zo.data());
  vec_mat_acc(h_prev, hidden_, ug.w, zg.data());
  for (int j = 0; j < hidden_; ++j) {
    const double i = sigmoid(zi[j]);
    const double f = sigmoid(zf[j]);
    const double o = sigmoid(zo[j]);
    const double g = std::tanh(zg[j]);
    c[j] = f * c_prev[j] + i * g;
    h[j] = o * std::tanh(c[j]);
  }
}

Matrix LstmLayer::forward(const Matrix& x, LstmCache* cache) const {
  if (x.cols() != in_dim_) throw std::invalid_argument("lstm input width mismatch");
  const int T = x.rows();
  Matrix h_all(T, hidden_);
  if (cache) {
    cache->x = x;
    cache->gi = Matrix(T, hidden_);
    cache->gf = Matrix(T, hidden_);
    cache->go = Matrix(T, hidden_);
    cache->gg = Matrix(T, hidden_);
    cache->c = Matrix(T, hidden_);
    cache->tc = Matrix(T, hidden_);
  }

  std::vector<double> h_prev(hidden_, 0.0), c_prev(hidden_, 0.0);
  std::vector<double> zi(hidden_), zf(hidden_), zo(hidden_), zg(hidden_);
  for (int t = 0; t < T; ++t) {
    const double* xt = x.row(t);
    std::copy(bi.w.data().begin(), bi.w.data().end(), zi.begin());
    std::copy(bf.w.data().begin(), bf.w.data().end(), zf.begin());
    std::copy(bo.w.data().begin(), bo.w.data().end(), zo.begin());
    std::copy(bg.w.data().begin(), bg.w.data().end(), zg.begin());
    vec_mat_acc(xt, in_dim_, wi.w, zi.data());
    vec_mat_acc(xt, in_dim_, wf.w, zf.data());
    vec_mat_acc(xt, in_dim_, wo.w, zo.data());
    vec_mat_acc(xt, in_dim_, wg.w, zg.data());
    vec_mat_acc(h_prev.data(), hidden_, ui.w, zi.data());
    vec_mat_acc(h_prev.data(), hidden_, uf.w, zf.data());
    vec_mat_acc(h_prev.data(), hidden_, uo.w, zo.data());
    vec_mat_acc(h_prev.data(), hidden_, ug.w, zg.data());
    double* h_row = h_all.row(t);
    for (int j = 0; j < hidden_; ++j) {
      const double i = sigmoid(zi[j]);
      const double f = sigmoid(zf[j]);
      const double o = sigmoid(zo[j]);
      const double g = std::tanh(zg[j]);
      const double c = f * c_prev[j] + i * g;
      const double tc = std::tanh(c);
      h_row[j] = o * tc;
      if (cache) {
        cache->gi(t, j) = i;
        cache->gf(t, j) = f;
        cache->go(t, j) = o;
        cache->gg(t, j) = g;
        cache->c(t, j) = c;
        cache->tc(t, j) = tc;
      }
      c_prev[j] = c;
    }
    std::copy(h_row, h_row + hidden_, h_prev.begin());
  }
  if (cache) cache->h = h_all;
  return h_all;
}

Matrix LstmLayer::backward(const LstmCache& cache, const Matrix& d_h,
                           const double* d_hT, const double* d_cT) {
  const int T = cache.h.rows();
  if (d_h.rows() != T || d_h.cols() != hidden_) {
    throw std::invalid_argument("lstm backward gradient shape mismatch");
  }
  Matrix d_x(T, in_dim_);
  std::vector<double> dh_next(hidden_, 0.0), dc_next(hidden_, 0.0);
  if (d_hT) for (int j = 0; j < hidden_; ++j) dh_next[j] += d_hT[j];
  if (d_cT) for (int j = 0; j < hidden_; ++j) dc_next[j] += d_cT[j];

  std::vector<double> dzi(hidden_), dzf(hidden_), dzo(hidden_), dzg(hidden_);
  for (int t = T - 1; t >= 0; --t) {
    const double* h_prev = (t > 0) ? cache.h.row(t - 1) : nullptr;
    const double* c_prev = (t > 0) ? cache.c.row(t - 1) : nullptr;
    for (int j = 0; j < hidden_; ++j) {
      const double dh = d_h(t, j) + dh_next[j];
      const double i = cache.gi(t, j);
      const double f = cache.gf(t, j);
      const double o = cache.go(t, j);
      const double g = cache.gg(t, j);
      const double tc = cache.tc(t, j);
      const double dc = dh * o * (1.0 - tc * tc) + dc_next[j];
      const double cp = c_prev ? c_prev[j] : 0.0;
      dzo[j] = dh * tc * o * (1.0 - o);
      dzi[j] = dc * g * i * (1.0 - i);
      dzf[j] = dc * cp * f * (1.0 - f);
      dzg[j] = dc * i * (1.0 - g * g);
      dc_next[j] = dc * f;
    }
    const double* xt = cache.x.row(t);
    outer_acc(xt, in_dim_, dzi.data(), hidden_, wi.g);
    outer_acc(xt, in_dim_, dzf.data(), hidden_, wf.g);
    outer_acc(xt, in_dim_, dzo.data(), hidden_, wo.g);
    outer_acc(xt, in_dim_, dzg.data(), hidden_, wg.g);
    if (h_prev) {
      outer_acc(h_prev, hidden_, dzi.data(), hidden_, ui.g);
      outer_acc(h_prev, hidden_, dzf.data(), hidden_, uf.g);
      outer_acc(h_prev, hidden_, dzo.data(), hidden_, uo.g);
      outer_acc(h_prev, hidden_, dzg.data(), hidden_, ug.g);
    }
    for (int j = 0; j < hidden_; ++j) {
      bi.g(0, j) += dzi[j];
      bf.g(0, j) += dzf[j];
      bo.g(0, j) += dzo[j];
      bg.g(0, j) += dzg[j];
    }
    double* dx_row = d_x.row(t);
    vec_matT_acc(dzi.data(), hidden_, wi.w, dx_row);
    vec_matT_acc(dzf.data(), hidden_, wf.w, dx_row);
    vec_matT_acc(dzo.data(), hidden_, wo.w, dx_row);
    vec_matT_acc(dzg.data(), hidden_, wg.w, dx_row);
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    vec_matT_acc(dzi.data(), hidden_, ui.w, dh_next.data());
    vec_matT_acc(dzf.data(), hidden_, uf.w, dh_next.data());
    vec_matT_acc(dzo.data(), hidden_, uo.w, dh_next.data());
    vec_matT_acc(dzg.data(), hidden_, ug.w, dh_next.data());
  }
  return d_x;
}

LstmStack::LstmStack(const std::string& name, int in_dim, const std::vector<int>& hidden_sizes,
                     bool interlayer_relu)
    : interlayer_relu_(interlayer_relu) {
  if (hidden_sizes.empty()) throw std::invalid_argument("empty lstm stack");
  int prev = in_dim;
  for (std::size_t l = 0; l < hidden_sizes.size(); ++l) {
    layers_.emplace_back(name + std::to_string(l), prev, hidden_sizes[l]);
    prev = hidden_sizes[l];
  }
}

int LstmStack::in_dim() const { return layers_.front().in_dim(); }
int LstmStack::out_dim() const { return layers_.back().hidden(); }

void LstmStack::init_params(Rng& rng) {
  for (auto& layer : layers_) layer.init_params(rng);
}

ParamList LstmStack::params() {
  ParamList all;
  for (auto& layer : layers_) {
    for (Param* p : layer.params()) all.push_back(p);
  }
  return all;
}

Matrix LstmStack::forward(const Matrix& x, StackCache* cache) const {
  if (cache) {
    cache->layers.assign(layers_.size(), LstmCache{});
    cache->inputs.clear();
    cache->inputs.reserve(layers_.size());
  }
  Matrix current = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (cache) cache->inputs.push_back(current);
    Matrix h = layers_[l].forward(current, cache ? &cache->layers[l] : nullptr);
    if (l + 1 < layers_.size() && interlayer_relu_) {
      for (double& v : h.data()) v = v > 0.0 ? v : 0.0;
    }
    current = std::move(h);
  }
  return current;
}

std::vector<LayerState> LstmStack::final_states(const StackCache& cache) const {
  std::vector<LayerState> states;
  states.reserve(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LstmCache& c = cache.layers[l];
    const int T = c.h.rows();
    LayerState st;
    st.h.assign(c.h.row(T - 1), c.h.row(T - 1) + layers_[l].hidden());
    st.c.assign(c.c.row(T - 1), c.c.row(T - 1) + layers_[l].hidden());
    states.push_back(std::move(st));
  }
  return states;
}

Matrix LstmStack::backward(const StackCache& cache, const Matrix& d_h_top,
                           const double* d_hT_top) {
  Matrix d_current = d_h_top;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const bool top = (l == layers_.size() - 1);
    Matrix d_input = layers_[l].backward(cache.layers[l], d_current,
                                         top ? d_hT_top : nullptr, nullptr);
    if (l > 0 && interlayer_relu_) {
      // gradient passes the inter-layer ReLU only where the stream was positive
      const Matrix& fed = cache.inputs[l];
      for (int r = 0; r < d_input.rows(); ++r) {
        for (int c = 0; c < d_input.cols(); ++c) {
          if (fed(r, c) <= 0.0) d_input(r, c) = 0.0;
        }
      }
    }
    d_current = std::move(d_input);
  }
  return d_current;
}

void clip_global_norm(const ParamList& params, double max_norm) {
  if (max_norm <= 0.0) return;
  double sq = 0.0;
  for (const Param* p : params) {
    for (double v : p->g.data()) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (Param* p : params) {
    for (double& v : p->g.data()) v *= scale;
  }
}

}  // namespace dablog::nn
