#include "offlang/neural.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "offlang/errors.hpp"

namespace offlang {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y += W * x, W is [rows x cols]
void matvec_add(const Tensor& w, const double* x, double* y) {
  const std::size_t rows = w.dim(0), cols = w.dim(1);
  const double* p = w.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += p[r * cols + c] * x[c];
    y[r] += s;
  }
}

// y += W^T * g
void matvec_t_add(const Tensor& w, const double* g, double* y) {
  const std::size_t rows = w.dim(0), cols = w.dim(1);
  const double* p = w.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) y[c] += gr * p[r * cols + c];
  }
}

// W += g (x) x  (outer product accumulate)
void outer_add(Tensor& w, const double* g, const double* x) {
  const std::size_t rows = w.dim(0), cols = w.dim(1);
  double* p = w.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) p[r * cols + c] += gr * x[c];
  }
}

void init_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-a, a);
}

std::vector<double> head_softmax(const Tensor& out_w, const Tensor& out_b,
                                 const double* h) {
  std::vector<double> logits(out_w.dim(0));
  for (std::size_t r = 0; r < logits.size(); ++r) logits[r] = out_b[r];
  matvec_add(out_w, h, logits.data());
  return softmax(logits);
}

}  // namespace

std::vector<double> softmax(const std::vector<double>& logits) {
  double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

Tensor embed(const EmbeddingTable& table, const IndexSequence& seq) {
  const std::size_t len = seq.indices.size();
  const std::size_t dim = table.dim();
  Tensor out({len, dim});
  for (std::size_t t = 0; t < len; ++t) {
    int idx = seq.indices[t];
    if (idx < 0 || static_cast<std::size_t>(idx) >= table.rows())
      throw ValidationError("embed: index " + std::to_string(idx) +
                            " out of range");
    const double* row = table.weights.data() + static_cast<std::size_t>(idx) * dim;
    std::copy(row, row + dim, out.data() + t * dim);
  }
  return out;
}

std::vector<double> inverted_dropout(const std::vector<double>& x, double p,
                                     Rng& rng) {
  if (p <= 0.0) return x;
  if (p >= 1.0) throw ValidationError("dropout rate must be < 1");
  std::vector<double> out(x.size());
  const double scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = rng.next_double() < p ? 0.0 : x[i] * scale;
  return out;
}

std::vector<std::vector<double>> conv1d_relu(const Tensor& x,
                                             const Tensor& filters,
                                             const Tensor& bias) {
  const std::size_t len = x.dim(0), dim = x.dim(1);
  const std::size_t n_filters = filters.dim(0), k = filters.dim(1);
  if (len < k)
    throw ValidationError("conv1d: sequence length " + std::to_string(len) +
                          " shorter than kernel " + std::to_string(k));
  const std::size_t positions = len - k + 1;
  std::vector<std::vector<double>> maps(n_filters,
                                        std::vector<double>(positions));
  for (std::size_t f = 0; f < n_filters; ++f) {
    const double* w = filters.data() + f * k * dim;
    for (std::size_t pos = 0; pos < positions; ++pos) {
      double s = bias[f];
      const double* window = x.data() + pos * dim;
      for (std::size_t i = 0; i < k * dim; ++i) s += window[i] * w[i];
      maps[f][pos] = s > 0.0 ? s : 0.0;
    }
  }
  return maps;
}

std::vector<double> conv1d_relu_maxpool(const Tensor& x,
                                        const std::vector<Tensor>& filters,
                                        const std::vector<Tensor>& biases) {
  std::vector<double> pooled;
  for (std::size_t g = 0; g < filters.size(); ++g) {
    auto maps = conv1d_relu(x, filters[g], biases[g]);
    for (const auto& map : maps)
      pooled.push_back(*std::max_element(map.begin(), map.end()));
  }
  return pooled;
}

// ---------------------------------------------------------------------------
// CNN

namespace {

struct CnnCache {
  Tensor x;  // [L x E]
  std::vector<std::vector<std::vector<double>>> act;  // group -> filter -> pos
  std::vector<std::vector<std::size_t>> argmax;       // group -> filter
  std::vector<double> pooled;        // after max-over-time
  std::vector<double> mask_scale;    // dropout factor per unit (1 if eval)
  std::vector<double> dropped;       // pooled after dropout
  std::vector<double> probs;
};

std::vector<double> cnn_forward_cached(const CnnModel& m, const IndexSequence& seq,
                                       bool train_mode, Rng* rng,
                                       CnnCache* cache) {
  CnnCache local;
  CnnCache& c = cache ? *cache : local;
  c.x = embed(m.embedding, seq);

  // Windows that sit entirely in the PAD tail see only zero rows, so their
  // activation is ReLU(bias) at every such position; fold them into one
  // candidate instead of scanning the tail. Bit-identical to the full scan.
  const std::size_t len = c.x.dim(0), dim = c.x.dim(1);
  const auto live_rows = static_cast<std::size_t>(seq.true_length);

  c.act.clear();
  c.argmax.clear();
  c.pooled.clear();
  for (std::size_t g = 0; g < m.filters.size(); ++g) {
    const Tensor& filters = m.filters[g];
    const Tensor& bias = m.conv_bias[g];
    const std::size_t k = filters.dim(1);
    if (len < k)
      throw ValidationError("conv1d: sequence length " + std::to_string(len) +
                            " shorter than kernel " + std::to_string(k));
    const std::size_t positions = len - k + 1;
    const std::size_t live = std::min(positions, live_rows);

    std::vector<std::vector<double>> maps(filters.dim(0));
    std::vector<std::size_t> arg(filters.dim(0));
    for (std::size_t f = 0; f < filters.dim(0); ++f) {
      const double* w = filters.data() + f * k * dim;
      auto& map = maps[f];
      map.resize(live);
      for (std::size_t pos = 0; pos < live; ++pos) {
        double s = bias[f];
        const double* window = c.x.data() + pos * dim;
        for (std::size_t i = 0; i < k * dim; ++i) s += window[i] * w[i];
        map[pos] = s > 0.0 ? s : 0.0;
      }
      double best;
      std::size_t best_pos;
      if (live > 0) {
        auto it = std::max_element(map.begin(), map.end());
        best = *it;
        best_pos = static_cast<std::size_t>(it - map.begin());
      } else {
        best = -1.0;
        best_pos = 0;
      }
      if (live < positions) {
        double tail = bias[f] > 0.0 ? bias[f] : 0.0;
        if (tail > best) {  // earlier live positions win ties, as a full scan would
          best = tail;
          best_pos = live;  // sentinel: the first all-PAD window
        }
      }
      arg[f] = best_pos;
      c.pooled.push_back(best);
    }
    c.act.push_back(std::move(maps));
    c.argmax.push_back(std::move(arg));
  }

  c.mask_scale.assign(c.pooled.size(), 1.0);
  if (train_mode && m.dropout > 0.0) {
    const double scale = 1.0 / (1.0 - m.dropout);
    for (double& s : c.mask_scale)
      s = rng->next_double() < m.dropout ? 0.0 : scale;
  }
  c.dropped.resize(c.pooled.size());
  for (std::size_t i = 0; i < c.pooled.size(); ++i)
    c.dropped[i] = c.pooled[i] * c.mask_scale[i];

  c.probs = head_softmax(m.out_w, m.out_b, c.dropped.data());
  return c.probs;
}

// grads align with named_parameters order: embedding, filters..., biases...,
// out_w, out_b
void cnn_backward(const CnnModel& m, const IndexSequence& seq, const CnnCache& c,
                  const std::vector<double>& dlogits, std::vector<Tensor>& grads) {
  const std::size_t groups = m.filters.size();
  Tensor& g_emb = grads[0];
  Tensor& g_out_w = grads[1 + 2 * groups];
  Tensor& g_out_b = grads[2 + 2 * groups];

  outer_add(g_out_w, dlogits.data(), c.dropped.data());
  for (std::size_t r = 0; r < dlogits.size(); ++r) g_out_b[r] += dlogits[r];

  std::vector<double> d_dropped(c.dropped.size(), 0.0);
  matvec_t_add(m.out_w, dlogits.data(), d_dropped.data());

  const std::size_t dim = m.embedding.dim();
  Tensor dx({c.x.dim(0), dim});
  std::size_t unit = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    Tensor& g_filters = grads[1 + g];
    Tensor& g_bias = grads[1 + groups + g];
    const std::size_t k = m.filters[g].dim(1);
    for (std::size_t f = 0; f < static_cast<std::size_t>(m.n_filters); ++f, ++unit) {
      double d_pool = d_dropped[unit] * c.mask_scale[unit];
      if (d_pool == 0.0) continue;
      std::size_t pos = c.argmax[g][f];
      if (pos >= c.act[g][f].size()) {
        // an all-PAD window won the pool; only its bias carries gradient
        if (m.conv_bias[g][f] > 0.0) g_bias[f] += d_pool;
        continue;
      }
      if (c.act[g][f][pos] <= 0.0) continue;  // ReLU floor, no gradient
      const double* window = c.x.data() + pos * dim;
      double* gw = g_filters.data() + f * k * dim;
      const double* w = m.filters[g].data() + f * k * dim;
      double* dxw = dx.data() + pos * dim;
      for (std::size_t i = 0; i < k * dim; ++i) {
        gw[i] += d_pool * window[i];
        dxw[i] += d_pool * w[i];
      }
      g_bias[f] += d_pool;
    }
  }

  for (std::size_t t = 0; t < c.x.dim(0); ++t) {
    auto row = static_cast<std::size_t>(seq.indices[t]);
    double* dst = g_emb.data() + row * dim;
    const double* src = dx.data() + t * dim;
    for (std::size_t e = 0; e < dim; ++e) dst[e] += src[e];
  }
}

}  // namespace

std::vector<double> cnn_forward(const CnnModel& model, const IndexSequence& seq,
                                bool train_mode, Rng& rng) {
  return cnn_forward_cached(model, seq, train_mode, &rng, nullptr);
}

// ---------------------------------------------------------------------------
// LSTM

namespace {

struct LstmCache {
  Tensor x;  // [L x E]
  // per live step
  std::vector<std::vector<double>> xh, i, f, o, g, c, tanh_c, h;
  std::vector<double> h_last, hh_pre, hh;
  std::vector<double> probs;
};

std::vector<double> lstm_forward_cached(const LstmModel& m,
                                        const IndexSequence& seq,
                                        LstmCache* cache) {
  LstmCache local;
  LstmCache& s = cache ? *cache : local;
  s.x = embed(m.embedding, seq);
  const std::size_t H = m.hidden, E = m.embedding.dim();
  const std::size_t T = static_cast<std::size_t>(seq.true_length);

  s.xh.assign(T, {});
  s.i.assign(T, {});
  s.f.assign(T, {});
  s.o.assign(T, {});
  s.g.assign(T, {});
  s.c.assign(T, {});
  s.tanh_c.assign(T, {});
  s.h.assign(T, {});

  std::vector<double> h_prev(H, 0.0), c_prev(H, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    auto& xh = s.xh[t];
    xh.resize(E + H);
    std::copy(s.x.data() + t * E, s.x.data() + (t + 1) * E, xh.begin());
    std::copy(h_prev.begin(), h_prev.end(), xh.begin() + static_cast<long>(E));

    auto gate = [&](const Tensor& w, const Tensor& b) {
      std::vector<double> pre(H);
      for (std::size_t r = 0; r < H; ++r) pre[r] = b[r];
      matvec_add(w, xh.data(), pre.data());
      return pre;
    };
    s.i[t] = gate(m.w_i, m.b_i);
    s.f[t] = gate(m.w_f, m.b_f);
    s.o[t] = gate(m.w_o, m.b_o);
    s.g[t] = gate(m.w_g, m.b_g);
    s.c[t].resize(H);
    s.tanh_c[t].resize(H);
    s.h[t].resize(H);
    for (std::size_t r = 0; r < H; ++r) {
      double iv = sigmoid(s.i[t][r]);
      double fv = sigmoid(s.f[t][r]);
      double ov = sigmoid(s.o[t][r]);
      double gv = std::tanh(s.g[t][r]);
      s.i[t][r] = iv;
      s.f[t][r] = fv;
      s.o[t][r] = ov;
      s.g[t][r] = gv;
      double cv = fv * c_prev[r] + iv * gv;
      s.c[t][r] = cv;
      s.tanh_c[t][r] = std::tanh(cv);
      s.h[t][r] = ov * s.tanh_c[t][r];
    }
    h_prev = s.h[t];
    c_prev = s.c[t];
  }

  s.h_last = T > 0 ? s.h[T - 1] : std::vector<double>(H, 0.0);
  const std::size_t HH = m.head_w.dim(0);
  s.hh_pre.assign(HH, 0.0);
  for (std::size_t r = 0; r < HH; ++r) s.hh_pre[r] = m.head_b[r];
  matvec_add(m.head_w, s.h_last.data(), s.hh_pre.data());
  s.hh.resize(HH);
  for (std::size_t r = 0; r < HH; ++r) s.hh[r] = std::max(0.0, s.hh_pre[r]);
  s.probs = head_softmax(m.out_w, m.out_b, s.hh.data());
  return s.probs;
}

// grads order: embedding, w_i, w_f, w_o, w_g, b_i, b_f, b_o, b_g,
//              head_w, head_b, out_w, out_b
void lstm_backward(const LstmModel& m, const IndexSequence& seq,
                   const LstmCache& s, const std::vector<double>& dlogits,
                   std::vector<Tensor>& grads) {
  const std::size_t H = m.hidden, E = m.embedding.dim();
  const std::size_t T = static_cast<std::size_t>(seq.true_length);
  Tensor& g_emb = grads[0];
  Tensor &g_wi = grads[1], &g_wf = grads[2], &g_wo = grads[3], &g_wg = grads[4];
  Tensor &g_bi = grads[5], &g_bf = grads[6], &g_bo = grads[7], &g_bg = grads[8];
  Tensor &g_head_w = grads[9], &g_head_b = grads[10];
  Tensor &g_out_w = grads[11], &g_out_b = grads[12];

  const std::size_t HH = m.head_w.dim(0);
  outer_add(g_out_w, dlogits.data(), s.hh.data());
  for (std::size_t r = 0; r < dlogits.size(); ++r) g_out_b[r] += dlogits[r];

  std::vector<double> dhh(HH, 0.0);
  matvec_t_add(m.out_w, dlogits.data(), dhh.data());
  for (std::size_t r = 0; r < HH; ++r)
    if (s.hh_pre[r] <= 0.0) dhh[r] = 0.0;
  outer_add(g_head_w, dhh.data(), s.h_last.data());
  for (std::size_t r = 0; r < HH; ++r) g_head_b[r] += dhh[r];

  std::vector<double> dh(H, 0.0), dc(H, 0.0);
  matvec_t_add(m.head_w, dhh.data(), dh.data());

  std::vector<double> dpre_i(H), dpre_f(H), dpre_o(H), dpre_g(H), dxh(E + H);
  for (std::size_t tt = T; tt-- > 0;) {
    const auto& i = s.i[tt];
    const auto& f = s.f[tt];
    const auto& o = s.o[tt];
    const auto& g = s.g[tt];
    const auto& tc = s.tanh_c[tt];
    for (std::size_t r = 0; r < H; ++r) {
      double c_prev = tt > 0 ? s.c[tt - 1][r] : 0.0;
      double dtc = dh[r] * o[r];
      double do_ = dh[r] * tc[r];
      double dcr = dc[r] + dtc * (1.0 - tc[r] * tc[r]);
      double di = dcr * g[r];
      double dg = dcr * i[r];
      double df = dcr * c_prev;
      dpre_i[r] = di * i[r] * (1.0 - i[r]);
      dpre_f[r] = df * f[r] * (1.0 - f[r]);
      dpre_o[r] = do_ * o[r] * (1.0 - o[r]);
      dpre_g[r] = dg * (1.0 - g[r] * g[r]);
      dc[r] = dcr * f[r];
    }
    const auto& xh = s.xh[tt];
    outer_add(g_wi, dpre_i.data(), xh.data());
    outer_add(g_wf, dpre_f.data(), xh.data());
    outer_add(g_wo, dpre_o.data(), xh.data());
    outer_add(g_wg, dpre_g.data(), xh.data());
    for (std::size_t r = 0; r < H; ++r) {
      g_bi[r] += dpre_i[r];
      g_bf[r] += dpre_f[r];
      g_bo[r] += dpre_o[r];
      g_bg[r] += dpre_g[r];
    }
    std::fill(dxh.begin(), dxh.end(), 0.0);
    matvec_t_add(m.w_i, dpre_i.data(), dxh.data());
    matvec_t_add(m.w_f, dpre_f.data(), dxh.data());
    matvec_t_add(m.w_o, dpre_o.data(), dxh.data());
    matvec_t_add(m.w_g, dpre_g.data(), dxh.data());

    auto row = static_cast<std::size_t>(seq.indices[tt]);
    double* dst = g_emb.data() + row * E;
    for (std::size_t e = 0; e < E; ++e) dst[e] += dxh[e];
    for (std::size_t r = 0; r < H; ++r) dh[r] = dxh[E + r];
  }
}

}  // namespace

std::vector<double> lstm_forward(const LstmModel& model,
                                 const IndexSequence& seq) {
  return lstm_forward_cached(model, seq, nullptr);
}

// ---------------------------------------------------------------------------
// GRU

namespace {

struct GruCache {
  Tensor x;
  std::vector<std::vector<double>> xh, xrh, z, r, hbar, h;
  std::vector<double> h_last, hh_pre, hh;
  std::vector<double> probs;
};

std::vector<double> gru_forward_cached(const GruModel& m, const IndexSequence& seq,
                                       GruCache* cache) {
  GruCache local;
  GruCache& s = cache ? *cache : local;
  s.x = embed(m.embedding, seq);
  const std::size_t H = m.hidden, E = m.embedding.dim();
  const std::size_t T = static_cast<std::size_t>(seq.true_length);

  s.xh.assign(T, {});
  s.xrh.assign(T, {});
  s.z.assign(T, {});
  s.r.assign(T, {});
  s.hbar.assign(T, {});
  s.h.assign(T, {});

  std::vector<double> h_prev(H, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    auto& xh = s.xh[t];
    xh.resize(E + H);
    std::copy(s.x.data() + t * E, s.x.data() + (t + 1) * E, xh.begin());
    std::copy(h_prev.begin(), h_prev.end(), xh.begin() + static_cast<long>(E));

    s.z[t].assign(H, 0.0);
    s.r[t].assign(H, 0.0);
    for (std::size_t r = 0; r < H; ++r) {
      s.z[t][r] = m.b_z[r];
      s.r[t][r] = m.b_r[r];
    }
    matvec_add(m.w_z, xh.data(), s.z[t].data());
    matvec_add(m.w_r, xh.data(), s.r[t].data());
    for (std::size_t r = 0; r < H; ++r) {
      s.z[t][r] = sigmoid(s.z[t][r]);
      s.r[t][r] = sigmoid(s.r[t][r]);
    }

    auto& xrh = s.xrh[t];
    xrh.resize(E + H);
    std::copy(s.x.data() + t * E, s.x.data() + (t + 1) * E, xrh.begin());
    for (std::size_t r = 0; r < H; ++r) xrh[E + r] = s.r[t][r] * h_prev[r];

    s.hbar[t].assign(H, 0.0);
    for (std::size_t r = 0; r < H; ++r) s.hbar[t][r] = m.b_h[r];
    matvec_add(m.w_h, xrh.data(), s.hbar[t].data());
    s.h[t].resize(H);
    for (std::size_t r = 0; r < H; ++r) {
      s.hbar[t][r] = std::tanh(s.hbar[t][r]);
      s.h[t][r] = (1.0 - s.z[t][r]) * h_prev[r] + s.z[t][r] * s.hbar[t][r];
    }
    h_prev = s.h[t];
  }

  s.h_last = T > 0 ? s.h[T - 1] : std::vector<double>(H, 0.0);
  const std::size_t HH = m.head_w.dim(0);
  s.hh_pre.assign(HH, 0.0);
  for (std::size_t r = 0; r < HH; ++r) s.hh_pre[r] = m.head_b[r];
  matvec_add(m.head_w, s.h_last.data(), s.hh_pre.data());
  s.hh.resize(HH);
  for (std::size_t r = 0; r < HH; ++r) s.hh[r] = std::max(0.0, s.hh_pre[r]);
  s.probs = head_softmax(m.out_w, m.out_b, s.hh.data());
  return s.probs;
}

// grads order: embedding, w_z, w_r, w_h, b_z, b_r, b_h, head_w, head_b,
//              out_w, out_b
void gru_backward(const GruModel& m, const IndexSequence& seq, const GruCache& s,
                  const std::vector<double>& dlogits, std::vector<Tensor>& grads) {
  const std::size_t H = m.hidden, E = m.embedding.dim();
  const std::size_t T = static_cast<std::size_t>(seq.true_length);
  Tensor& g_emb = grads[0];
  Tensor &g_wz = grads[1], &g_wr = grads[2], &g_wh = grads[3];
  Tensor &g_bz = grads[4], &g_br = grads[5], &g_bh = grads[6];
  Tensor &g_head_w = grads[7], &g_head_b = grads[8];
  Tensor &g_out_w = grads[9], &g_out_b = grads[10];

  const std::size_t HH = m.head_w.dim(0);
  outer_add(g_out_w, dlogits.data(), s.hh.data());
  for (std::size_t r = 0; r < dlogits.size(); ++r) g_out_b[r] += dlogits[r];

  std::vector<double> dhh(HH, 0.0);
  matvec_t_add(m.out_w, dlogits.data(), dhh.data());
  for (std::size_t r = 0; r < HH; ++r)
    if (s.hh_pre[r] <= 0.0) dhh[r] = 0.0;
  outer_add(g_head_w, dhh.data(), s.h_last.data());
  for (std::size_t r = 0; r < HH; ++r) g_head_b[r] += dhh[r];

  std::vector<double> dh(H, 0.0);
  matvec_t_add(m.head_w, dhh.data(), dh.data());

  std::vector<double> dpre_z(H), dpre_r(H), dpre_h(H), dxh(E + H), dxrh(E + H),
      dh_prev(H), dx(E);
  for (std::size_t tt = T; tt-- > 0;) {
    const auto& z = s.z[tt];
    const auto& r = s.r[tt];
    const auto& hbar = s.hbar[tt];
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    std::fill(dx.begin(), dx.end(), 0.0);

    for (std::size_t q = 0; q < H; ++q) {
      double h_prev = tt > 0 ? s.h[tt - 1][q] : 0.0;
      double dz = dh[q] * (hbar[q] - h_prev);
      double dhbar = dh[q] * z[q];
      dh_prev[q] += dh[q] * (1.0 - z[q]);
      dpre_h[q] = dhbar * (1.0 - hbar[q] * hbar[q]);
      dpre_z[q] = dz * z[q] * (1.0 - z[q]);
    }
    outer_add(g_wh, dpre_h.data(), s.xrh[tt].data());
    for (std::size_t q = 0; q < H; ++q) g_bh[q] += dpre_h[q];

    std::fill(dxrh.begin(), dxrh.end(), 0.0);
    matvec_t_add(m.w_h, dpre_h.data(), dxrh.data());
    for (std::size_t e = 0; e < E; ++e) dx[e] += dxrh[e];
    for (std::size_t q = 0; q < H; ++q) {
      double h_prev = tt > 0 ? s.h[tt - 1][q] : 0.0;
      double drh = dxrh[E + q];
      double dr = drh * h_prev;
      dh_prev[q] += drh * r[q];
      dpre_r[q] = dr * r[q] * (1.0 - r[q]);
    }
    outer_add(g_wz, dpre_z.data(), s.xh[tt].data());
    outer_add(g_wr, dpre_r.data(), s.xh[tt].data());
    for (std::size_t q = 0; q < H; ++q) {
      g_bz[q] += dpre_z[q];
      g_br[q] += dpre_r[q];
    }
    std::fill(dxh.begin(), dxh.end(), 0.0);
    matvec_t_add(m.w_z, dpre_z.data(), dxh.data());
    matvec_t_add(m.w_r, dpre_r.data(), dxh.data());
    for (std::size_t e = 0; e < E; ++e) dx[e] += dxh[e];
    for (std::size_t q = 0; q < H; ++q) dh_prev[q] += dxh[E + q];

    auto row = static_cast<std::size_t>(seq.indices[tt]);
    double* dst = g_emb.data() + row * E;
    for (std::size_t e = 0; e < E; ++e) dst[e] += dx[e];
    dh = dh_prev;
  }
}

}  // namespace

std::vector<double> gru_forward(const GruModel& model, const IndexSequence& seq) {
  return gru_forward_cached(model, seq, nullptr);
}

// ---------------------------------------------------------------------------
// Model assembly

int NeuralModel::n_classes() const {
  return std::visit([](const auto& m) { return m.n_classes; }, net);
}

std::size_t NeuralModel::max_len() const {
  return std::visit([](const auto& m) { return m.max_len; }, net);
}

std::size_t NeuralModel::vocab_rows() const {
  return std::visit([](const auto& m) { return m.embedding.rows(); }, net);
}

std::vector<double> NeuralModel::forward(const IndexSequence& seq) const {
  switch (kind) {
    case Kind::cnn: {
      Rng unused(0);
      return cnn_forward(std::get<CnnModel>(net), seq, false, unused);
    }
    case Kind::lstm:
      return lstm_forward(std::get<LstmModel>(net), seq);
    case Kind::gru:
      return gru_forward(std::get<GruModel>(net), seq);
  }
  throw Error("unreachable");
}

NeuralModel::Kind neural_kind_from_string(const std::string& s) {
  if (s == "cnn") return NeuralModel::Kind::cnn;
  if (s == "lstm") return NeuralModel::Kind::lstm;
  if (s == "gru") return NeuralModel::Kind::gru;
  throw ValidationError("unknown neural model kind: '" + s + "'");
}

std::string to_string(NeuralModel::Kind kind) {
  switch (kind) {
    case NeuralModel::Kind::cnn: return "cnn";
    case NeuralModel::Kind::lstm: return "lstm";
    case NeuralModel::Kind::gru: return "gru";
  }
  return "cnn";
}

NeuralModel make_neural(NeuralModel::Kind kind, const NeuralConfig& config,
                        int n_classes, std::size_t vocab_rows,
                        std::size_t max_len, std::uint64_t seed) {
  if (n_classes < 2) throw ValidationError("make_neural: need >= 2 classes");
  if (max_len < 1) throw ValidationError("make_neural: max_len must be >= 1");
  Rng rng(seed);
  const std::size_t E = config.embed_dim;
  const auto C = static_cast<std::size_t>(n_classes);

  auto make_embedding = [&] {
    EmbeddingTable emb;
    emb.weights = Tensor({vocab_rows, E});
    init_uniform(emb.weights, vocab_rows, E, rng);
    for (std::size_t e = 0; e < E; ++e) emb.weights[e] = 0.0;  // PAD row
    return emb;
  };

  NeuralModel model;
  model.kind = kind;
  switch (kind) {
    case NeuralModel::Kind::cnn: {
      CnnModel m;
      m.embedding = make_embedding();
      m.kernel_sizes = config.kernel_sizes;
      if (m.kernel_sizes.empty())
        throw ValidationError("make_neural: cnn needs at least one kernel size");
      for (int k : m.kernel_sizes)
        if (k < 1 || static_cast<std::size_t>(k) > max_len)
          throw ValidationError("make_neural: kernel size " + std::to_string(k) +
                                " exceeds max_len " + std::to_string(max_len));
      m.n_filters = config.n_filters;
      m.dropout = config.dropout;
      if (m.n_filters < 1)
        throw ValidationError("make_neural: n_filters must be >= 1");
      if (m.dropout < 0.0 || m.dropout >= 1.0)
        throw ValidationError("make_neural: dropout must be in [0,1)");
      for (int k : m.kernel_sizes) {
        auto uk = static_cast<std::size_t>(k);
        Tensor filt({static_cast<std::size_t>(m.n_filters), uk, E});
        init_uniform(filt, uk * E, static_cast<std::size_t>(m.n_filters), rng);
        m.filters.push_back(std::move(filt));
        m.conv_bias.emplace_back(
            Tensor({static_cast<std::size_t>(m.n_filters)}));
      }
      m.out_w = Tensor({C, m.total_filters()});
      init_uniform(m.out_w, m.total_filters(), C, rng);
      m.out_b = Tensor({C});
      m.max_len = max_len;
      m.n_classes = n_classes;
      model.net = std::move(m);
      break;
    }
    case NeuralModel::Kind::lstm: {
      LstmModel m;
      m.embedding = make_embedding();
      m.hidden = config.hidden;
      const std::size_t H = m.hidden;
      for (Tensor* w : {&m.w_i, &m.w_f, &m.w_o, &m.w_g}) {
        *w = Tensor({H, E + H});
        init_uniform(*w, E + H, H, rng);
      }
      for (Tensor* b : {&m.b_i, &m.b_f, &m.b_o, &m.b_g}) *b = Tensor({H});
      m.head_w = Tensor({config.head_hidden, H});
      init_uniform(m.head_w, H, config.head_hidden, rng);
      m.head_b = Tensor({config.head_hidden});
      m.out_w = Tensor({C, config.head_hidden});
      init_uniform(m.out_w, config.head_hidden, C, rng);
      m.out_b = Tensor({C});
      m.max_len = max_len;
      m.n_classes = n_classes;
      model.net = std::move(m);
      break;
    }
    case NeuralModel::Kind::gru: {
      GruModel m;
      m.embedding = make_embedding();
      m.hidden = config.hidden;
      const std::size_t H = m.hidden;
      for (Tensor* w : {&m.w_z, &m.w_r, &m.w_h}) {
        *w = Tensor({H, E + H});
        init_uniform(*w, E + H, H, rng);
      }
      for (Tensor* b : {&m.b_z, &m.b_r, &m.b_h}) *b = Tensor({H});
      m.head_w = Tensor({config.head_hidden, H});
      init_uniform(m.head_w, H, config.head_hidden, rng);
      m.head_b = Tensor({config.head_hidden});
      m.out_w = Tensor({C, config.head_hidden});
      init_uniform(m.out_w, config.head_hidden, C, rng);
      m.out_b = Tensor({C});
      m.max_len = max_len;
      m.n_classes = n_classes;
      model.net = std::move(m);
      break;
    }
  }
  return model;
}

std::vector<std::pair<std::string, Tensor*>> named_parameters(NeuralModel& model) {
  std::vector<std::pair<std::string, Tensor*>> out;
  switch (model.kind) {
    case NeuralModel::Kind::cnn: {
      auto& m = std::get<CnnModel>(model.net);
      out.emplace_back("cnn.embedding", &m.embedding.weights);
      for (std::size_t g = 0; g < m.filters.size(); ++g)
        out.emplace_back("cnn.filters.k" + std::to_string(m.kernel_sizes[g]),
                         &m.filters[g]);
      for (std::size_t g = 0; g < m.conv_bias.size(); ++g)
        out.emplace_back("cnn.conv_bias.k" + std::to_string(m.kernel_sizes[g]),
                         &m.conv_bias[g]);
      out.emplace_back("cnn.out_w", &m.out_w);
      out.emplace_back("cnn.out_b", &m.out_b);
      break;
    }
    case NeuralModel::Kind::lstm: {
      auto& m = std::get<LstmModel>(model.net);
      out = {{"lstm.embedding", &m.embedding.weights},
             {"lstm.w_i", &m.w_i},
             {"lstm.w_f", &m.w_f},
             {"lstm.w_o", &m.w_o},
             {"lstm.w_g", &m.w_g},
             {"lstm.b_i", &m.b_i},
             {"lstm.b_f", &m.b_f},
             {"lstm.b_o", &m.b_o},
             {"lstm.b_g", &m.b_g},
             {"lstm.head_w", &m.head_w},
             {"lstm.head_b", &m.head_b},
             {"lstm.out_w", &m.out_w},
             {"lstm.out_b", &m.out_b}};
      break;
    }
    case NeuralModel::Kind::gru: {
      auto& m = std::get<GruModel>(model.net);
      out = {{"gru.embedding", &m.embedding.weights},
             {"gru.w_z", &m.w_z},
             {"gru.w_r", &m.w_r},
             {"gru.w_h", &m.w_h},
             {"gru.b_z", &m.b_z},
             {"gru.b_r", &m.b_r},
             {"gru.b_h", &m.b_h},
             {"gru.head_w", &m.head_w},
             {"gru.head_b", &m.head_b},
             {"gru.out_w", &m.out_w},
             {"gru.out_b", &m.out_b}};
      break;
    }
  }
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> named_parameters(
    const NeuralModel& model) {
  auto mut = named_parameters(const_cast<NeuralModel&>(model));
  std::vector<std::pair<std::string, const Tensor*>> out;
  out.reserve(mut.size());
  for (auto& [name, tensor] : mut) out.emplace_back(name, tensor);
  return out;
}

// ---------------------------------------------------------------------------
// Training

namespace {

std::vector<Tensor> zero_like(const std::vector<std::pair<std::string, Tensor*>>& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const auto& [name, t] : params) out.emplace_back(t->shape());
  return out;
}

// forward with cache + backward dispatch over kinds
std::vector<double> forward_cached(NeuralModel& model, const IndexSequence& seq,
                                   bool train_mode, Rng& rng, CnnCache& cnn_c,
                                   LstmCache& lstm_c, GruCache& gru_c) {
  switch (model.kind) {
    case NeuralModel::Kind::cnn:
      return cnn_forward_cached(std::get<CnnModel>(model.net), seq, train_mode,
                                &rng, &cnn_c);
    case NeuralModel::Kind::lstm:
      return lstm_forward_cached(std::get<LstmModel>(model.net), seq, &lstm_c);
    case NeuralModel::Kind::gru:
      return gru_forward_cached(std::get<GruModel>(model.net), seq, &gru_c);
  }
  throw Error("unreachable");
}

void backward_dispatch(NeuralModel& model, const IndexSequence& seq,
                       const CnnCache& cnn_c, const LstmCache& lstm_c,
                       const GruCache& gru_c, const std::vector<double>& dlogits,
                       std::vector<Tensor>& grads) {
  switch (model.kind) {
    case NeuralModel::Kind::cnn:
      cnn_backward(std::get<CnnModel>(model.net), seq, cnn_c, dlogits, grads);
      return;
    case NeuralModel::Kind::lstm:
      lstm_backward(std::get<LstmModel>(model.net), seq, lstm_c, dlogits, grads);
      return;
    case NeuralModel::Kind::gru:
      gru_backward(std::get<GruModel>(model.net), seq, gru_c, dlogits, grads);
      return;
  }
}

void zero_pad_row(const NeuralModel& model, std::vector<Tensor>& grads) {
  const std::size_t dim = grads[0].dim(1);
  for (std::size_t e = 0; e < dim; ++e) grads[0][e] = 0.0;
  (void)model;
}

void clip_global_norm(std::vector<Tensor>& grads, double clip) {
  if (clip <= 0.0) return;
  double sq = 0.0;
  for (const auto& g : grads)
    for (std::size_t i = 0; i < g.size(); ++i) sq += g[i] * g[i];
  double norm = std::sqrt(sq);
  if (norm <= clip) return;
  double scale = clip / norm;
  for (auto& g : grads)
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= scale;
}

}  // namespace

NeuralTrainResult train_neural(NeuralModel::Kind kind, const EncodedDataset& data,
                               const NeuralConfig& config,
                               const NeuralHyper& hyper, std::uint64_t seed) {
  if (data.sequences.empty() || data.sequences.size() != data.labels.size())
    throw ValidationError("train_neural: need non-empty sequences with labels");
  if (data.n_classes < 2)
    throw ValidationError("train_neural: need >= 2 classes");
  {
    std::vector<bool> present(static_cast<std::size_t>(data.n_classes), false);
    for (int label : data.labels) {
      if (label < 0 || label >= data.n_classes)
        throw ValidationError("train_neural: label out of range");
      present[static_cast<std::size_t>(label)] = true;
    }
    if (std::count(present.begin(), present.end(), true) < 2)
      throw ValidationError("train_neural: training data has a single class");
  }

  NeuralTrainResult result;
  result.model =
      make_neural(kind, config, data.n_classes, data.vocab_rows, data.max_len, seed);
  NeuralModel& model = result.model;
  auto params = named_parameters(model);
  std::vector<Tensor> grads = zero_like(params);

  Rng rng(Rng::derive(seed, 1));
  const std::size_t n = data.sequences.size();
  const std::size_t batch =
      std::min<std::size_t>(std::max(1, hyper.batch_size), n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  CnnCache cnn_c;
  LstmCache lstm_c;
  GruCache gru_c;
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    double lr = hyper.learning_rate / std::sqrt(static_cast<double>(epoch));
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      std::size_t stop = std::min(n, start + batch);
      for (auto& g : grads) g.fill(0.0);
      const double inv_b = 1.0 / static_cast<double>(stop - start);
      for (std::size_t b = start; b < stop; ++b) {
        const IndexSequence& seq = data.sequences[order[b]];
        int label = data.labels[order[b]];
        auto probs = forward_cached(model, seq, true, rng, cnn_c, lstm_c, gru_c);
        loss_sum -= std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-300));
        std::vector<double> dlogits(probs);
        dlogits[static_cast<std::size_t>(label)] -= 1.0;
        for (double& d : dlogits) d *= inv_b;
        backward_dispatch(model, seq, cnn_c, lstm_c, gru_c, dlogits, grads);
      }
      zero_pad_row(model, grads);
      clip_global_norm(grads, hyper.clip_norm);
      for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& w = *params[p].second;
        const Tensor& g = grads[p];
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
      }
    }
    double epoch_loss = loss_sum / static_cast<double>(n);
    if (!std::isfinite(epoch_loss))
      throw TrainingError("training diverged at epoch " + std::to_string(epoch));
    result.epoch_losses.push_back(epoch_loss);
  }
  return result;
}

double grad_check(NeuralModel::Kind kind, const GradCheckConfig& cfg,
                  std::uint64_t seed) {
  NeuralConfig config;
  config.embed_dim = cfg.embed_dim;
  config.kernel_sizes = cfg.kernel_sizes;
  config.n_filters = cfg.n_filters;
  config.dropout = 0.0;  // dropout off so the loss is deterministic
  config.hidden = cfg.hidden;
  config.head_hidden = cfg.head_hidden;

  const std::size_t rows = static_cast<std::size_t>(cfg.vocab_words) + 2;
  NeuralModel model =
      make_neural(kind, config, cfg.n_classes, rows, cfg.max_len, seed);
  if (kind == NeuralModel::Kind::cnn && cfg.conv_bias_init != 0.0)
    for (Tensor& bias : std::get<CnnModel>(model.net).conv_bias)
      bias.fill(cfg.conv_bias_init);

  Rng rng(Rng::derive(seed, 7));
  IndexSequence seq;
  seq.indices.assign(cfg.max_len, Vocabulary::pad_index);
  seq.true_length = cfg.true_length;
  for (int t = 0; t < cfg.true_length; ++t)
    seq.indices[static_cast<std::size_t>(t)] =
        1 + static_cast<int>(rng.uniform_index(rows - 1));
  auto label = static_cast<std::size_t>(
      rng.uniform_index(static_cast<std::size_t>(cfg.n_classes)));

  auto loss_fn = [&]() {
    auto probs = model.forward(seq);
    return -std::log(probs[label]);
  };

  // analytic gradients
  auto params = named_parameters(model);
  std::vector<Tensor> grads = zero_like(params);
  {
    CnnCache cnn_c;
    LstmCache lstm_c;
    GruCache gru_c;
    Rng unused(0);
    auto probs = forward_cached(model, seq, false, unused, cnn_c, lstm_c, gru_c);
    std::vector<double> dlogits(probs);
    dlogits[label] -= 1.0;
    backward_dispatch(model, seq, cnn_c, lstm_c, gru_c, dlogits, grads);
    zero_pad_row(model, grads);
  }

  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& w = *params[p].second;
    const bool is_embedding = (p == 0);
    const std::size_t skip = is_embedding ? w.dim(1) : 0;  // frozen PAD row
    for (std::size_t i = skip; i < w.size(); ++i) {
      double saved = w[i];
      w[i] = saved + h;
      double up = loss_fn();
      w[i] = saved - h;
      double down = loss_fn();
      w[i] = saved;
      double numeric = (up - down) / (2.0 * h);
      double analytic = grads[p][i];
      double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace offlang
