#include "paramt/seq2seq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "paramt/error.hpp"
#include "paramt/rng.hpp"

namespace paramt::seq2seq {
namespace {

using Vec = Eigen::VectorXd;
using subword::Vocabulary;

constexpr uint64_t kShuffleSalt = 0x51;
constexpr uint64_t kDropSalt = 0xD2;
constexpr uint64_t kCheckSalt = 0xC3;

Vec sigmoid(const Vec& x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }

void check_ids(const std::vector<int>& ids, size_t vocab, const char* side) {
  for (int id : ids)
    if (id < 0 || static_cast<size_t>(id) >= vocab)
      throw Error(std::string(side) + " id " + std::to_string(id) + " outside vocabulary of " +
                  std::to_string(vocab));
}

Mat dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  Mat m(rows, cols);
  const double keep_scale = 1.0 / (1.0 - rate);
  double* d = m.data();
  for (Eigen::Index k = 0; k < m.size(); ++k)
    d[k] = rng.uniform_real() < rate ? 0.0 : keep_scale;
  return m;
}

Mat embed_lookup(const Mat& table, const std::vector<int>& ids) {
  Mat x(table.cols(), static_cast<Eigen::Index>(ids.size()));
  for (size_t t = 0; t < ids.size(); ++t)
    x.col(static_cast<Eigen::Index>(t)) = table.row(ids[t]).transpose();
  return x;
}

// Per-layer activations kept for the backward pass. Gate order [i; f; g; o].
struct LayerFwd {
  Mat X;     // layer input after dropout (in_dim, T)
  Mat mask;  // dropout mask on X; empty in evaluation mode
  Mat I, F, G, O, C, TC, H;
  Vec h0, c0;
};

void lstm_forward(const LstmLayer& layer, LayerFwd& f) {
  const Eigen::Index H = layer.wh.cols();
  const Eigen::Index T = f.X.cols();
  f.I.resize(H, T);
  f.F.resize(H, T);
  f.G.resize(H, T);
  f.O.resize(H, T);
  f.C.resize(H, T);
  f.TC.resize(H, T);
  f.H.resize(H, T);
  const Mat zx = layer.wx * f.X;
  Vec h = f.h0;
  Vec c = f.c0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const Vec z = zx.col(t) + layer.wh * h + layer.b.col(0);
    f.I.col(t) = sigmoid(z.head(H));
    f.F.col(t) = sigmoid(z.segment(H, H));
    f.G.col(t) = z.segment(2 * H, H).array().tanh().matrix();
    f.O.col(t) = sigmoid(z.tail(H));
    c = f.F.col(t).cwiseProduct(c) + f.I.col(t).cwiseProduct(f.G.col(t));
    f.C.col(t) = c;
    f.TC.col(t) = c.array().tanh().matrix();
    h = f.O.col(t).cwiseProduct(f.TC.col(t));
    f.H.col(t) = h;
  }
}

// dH_ext holds per-step output gradients; dh_last/dc_last the extra gradient
// reaching the final state (decoder initialization). Returns the gradient on
// f.X and leaves the initial-state gradients in dh0/dc0.
Mat lstm_backward(const LstmLayer& layer, const LayerFwd& f, const Mat& dH_ext, const Vec& dh_last,
                  const Vec& dc_last, LstmLayer& grad, Vec& dh0, Vec& dc0) {
  const Eigen::Index H = layer.wh.cols();
  const Eigen::Index T = f.X.cols();
  Mat dZ(4 * H, T);
  Vec dh_next = dh_last;
  Vec dc_next = dc_last;
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const Vec dh = dH_ext.col(t) + dh_next;
    const Vec i = f.I.col(t);
    const Vec fg = f.F.col(t);
    const Vec g = f.G.col(t);
    const Vec o = f.O.col(t);
    const Vec tc = f.TC.col(t);
    const Vec c_prev = t == 0 ? f.c0 : Vec(f.C.col(t - 1));
    const Vec do_ = dh.cwiseProduct(tc);
    const Vec dc = dc_next + dh.cwiseProduct(o).cwiseProduct((1.0 - tc.array().square()).matrix());
    dc_next = dc.cwiseProduct(fg);
    dZ.col(t).head(H) = dc.cwiseProduct(g).cwiseProduct(i).cwiseProduct((1.0 - i.array()).matrix());
    dZ.col(t).segment(H, H) =
        dc.cwiseProduct(c_prev).cwiseProduct(fg).cwiseProduct((1.0 - fg.array()).matrix());
    dZ.col(t).segment(2 * H, H) = dc.cwiseProduct(i).cwiseProduct((1.0 - g.array().square()).matrix());
    dZ.col(t).tail(H) = do_.cwiseProduct(o).cwiseProduct((1.0 - o.array()).matrix());
    dh_next = layer.wh.transpose() * dZ.col(t);
  }
  dh0 = dh_next;
  dc0 = dc_next;

  Mat h_prev(H, T);
  h_prev.col(0) = f.h0;
  if (T > 1) h_prev.rightCols(T - 1) = f.H.leftCols(T - 1);
  grad.wx += dZ * f.X.transpose();
  grad.wh += dZ * h_prev.transpose();
  grad.b += dZ.rowwise().sum();
  return layer.wx.transpose() * dZ;
}

struct StackFwd {
  std::vector<LayerFwd> layers;
};

// Runs a layer stack over `input` (raw embeddings). Dropout applies to every
// layer input, embeddings included, when train is set.
StackFwd run_stack(const std::vector<LstmLayer>& stack, Mat input, const std::vector<Vec>* h_init,
                   const std::vector<Vec>* c_init, double dropout, bool train, Rng& rng) {
  StackFwd s;
  s.layers.resize(stack.size());
  const Eigen::Index H = stack[0].wh.cols();
  const Eigen::Index T = input.cols();
  for (size_t l = 0; l < stack.size(); ++l) {
    LayerFwd& f = s.layers[l];
    f.X = l == 0 ? std::move(input) : s.layers[l - 1].H;
    if (train && dropout > 0.0) {
      f.mask = dropout_mask(f.X.rows(), T, dropout, rng);
      f.X = f.X.cwiseProduct(f.mask);
    }
    f.h0 = h_init ? (*h_init)[l] : Vec::Zero(H);
    f.c0 = c_init ? (*c_init)[l] : Vec::Zero(H);
    lstm_forward(stack[l], f);
  }
  return s;
}

// Backpropagates dTop through the stack; returns the gradient on the raw
// layer-0 input. dh_last/dc_last give per-layer final-state gradients.
Mat stack_backward(const std::vector<LstmLayer>& stack, const StackFwd& s, Mat dTop,
                   const std::vector<Vec>* dh_last, const std::vector<Vec>* dc_last,
                   std::vector<LstmLayer>& grads, std::vector<Vec>& dh0, std::vector<Vec>& dc0) {
  const Eigen::Index H = stack[0].wh.cols();
  dh0.assign(stack.size(), Vec());
  dc0.assign(stack.size(), Vec());
  const Vec zero = Vec::Zero(H);
  Mat dH = std::move(dTop);
  for (size_t l = stack.size(); l-- > 0;) {
    Mat dX = lstm_backward(stack[l], s.layers[l], dH, dh_last ? (*dh_last)[l] : zero,
                           dc_last ? (*dc_last)[l] : zero, grads[l], dh0[l], dc0[l]);
    if (s.layers[l].mask.size() > 0) dX = dX.cwiseProduct(s.layers[l].mask);
    dH = std::move(dX);
  }
  return dH;
}

struct FwdCache {
  std::vector<int> src_ids;
  std::vector<int> dec_inputs;
  std::vector<int> targets;
  StackFwd enc, dec;
  std::vector<Vec> alpha;   // attention weights per step
  std::vector<Vec> attn_a;  // attn_w * d per step
  std::vector<Vec> ctx;
  std::vector<Vec> htilde;
  std::vector<Vec> probs;
  double sum_nll = 0.0;
};

FwdCache run_forward(const ModelParams& p, const std::vector<int>& src,
                     const std::vector<int>& tgt_wrapped, bool train, uint64_t seed) {
  if (src.empty()) throw Error("empty source sequence");
  if (tgt_wrapped.size() < 2 || tgt_wrapped.front() != Vocabulary::kBos ||
      tgt_wrapped.back() != Vocabulary::kEos)
    throw Error("target must be non-empty and wrapped with BOS/EOS");
  check_ids(src, p.vocab_size, "source");
  check_ids(tgt_wrapped, p.vocab_size, "target");

  const Eigen::Index H = static_cast<Eigen::Index>(p.config.hidden_dim);
  const size_t L = p.config.num_layers;
  Rng rng(seed);

  FwdCache f;
  f.src_ids = src;
  f.dec_inputs.assign(tgt_wrapped.begin(), tgt_wrapped.end() - 1);
  f.targets.assign(tgt_wrapped.begin() + 1, tgt_wrapped.end());

  f.enc = run_stack(p.encoder, embed_lookup(p.src_embed, src), nullptr, nullptr,
                    p.config.dropout_rate, train, rng);
  const Eigen::Index m = static_cast<Eigen::Index>(src.size());
  const Mat& memory = f.enc.layers.back().H;

  std::vector<Vec> h_init(L), c_init(L);
  for (size_t l = 0; l < L; ++l) {
    h_init[l] = f.enc.layers[l].H.col(m - 1);
    c_init[l] = f.enc.layers[l].C.col(m - 1);
  }
  f.dec = run_stack(p.decoder, embed_lookup(p.tgt_embed, f.dec_inputs), &h_init, &c_init,
                    p.config.dropout_rate, train, rng);

  const size_t T = f.dec_inputs.size();
  f.alpha.reserve(T);
  f.attn_a.reserve(T);
  f.ctx.reserve(T);
  f.htilde.reserve(T);
  f.probs.reserve(T);
  for (size_t t = 0; t < T; ++t) {
    const Vec d = f.dec.layers.back().H.col(static_cast<Eigen::Index>(t));
    Vec a = p.attn_w * d;
    Vec s = memory.transpose() * a;
    const double smax = s.maxCoeff();
    Vec alpha = (s.array() - smax).exp().matrix();
    alpha /= alpha.sum();
    Vec ctx = memory * alpha;
    Vec htilde =
        (p.combine_w.leftCols(H) * d + p.combine_w.rightCols(H) * ctx + p.combine_b.col(0))
            .array()
            .tanh()
            .matrix();
    Vec logits = p.out_w * htilde + p.out_b.col(0);
    const double lmax = logits.maxCoeff();
    const double lse = lmax + std::log((logits.array() - lmax).exp().sum());
    f.sum_nll += lse - logits(f.targets[t]);
    f.probs.push_back((logits.array() - lse).exp().matrix());
    f.alpha.push_back(std::move(alpha));
    f.attn_a.push_back(std::move(a));
    f.ctx.push_back(std::move(ctx));
    f.htilde.push_back(std::move(htilde));
  }
  return f;
}

// Accumulates d(sum of token NLLs)/dparams into g.
void run_backward(const ModelParams& p, const FwdCache& f, ModelParams& g) {
  const Eigen::Index H = static_cast<Eigen::Index>(p.config.hidden_dim);
  const Mat& memory = f.enc.layers.back().H;
  const Eigen::Index m = memory.cols();
  const size_t T = f.dec_inputs.size();

  Mat d_memory = Mat::Zero(H, m);
  Mat d_dec_top = Mat::Zero(H, static_cast<Eigen::Index>(T));
  for (size_t t = 0; t < T; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    const Vec d = f.dec.layers.back().H.col(ti);

    Vec dlogit = f.probs[t];
    dlogit(f.targets[t]) -= 1.0;
    g.out_w += dlogit * f.htilde[t].transpose();
    g.out_b += dlogit;
    const Vec dhtilde = p.out_w.transpose() * dlogit;
    const Vec du = dhtilde.cwiseProduct((1.0 - f.htilde[t].array().square()).matrix());
    g.combine_w.leftCols(H) += du * d.transpose();
    g.combine_w.rightCols(H) += du * f.ctx[t].transpose();
    g.combine_b += du;

    Vec dd = p.combine_w.leftCols(H).transpose() * du;
    const Vec dctx = p.combine_w.rightCols(H).transpose() * du;
    d_memory += dctx * f.alpha[t].transpose();
    const Vec dalpha = memory.transpose() * dctx;
    const double dot = f.alpha[t].dot(dalpha);
    const Vec ds = f.alpha[t].cwiseProduct((dalpha.array() - dot).matrix());
    const Vec da = memory * ds;
    d_memory += f.attn_a[t] * ds.transpose();
    g.attn_w += da * d.transpose();
    dd += p.attn_w.transpose() * da;
    d_dec_top.col(ti) = dd;
  }

  std::vector<Vec> d_dec_h0, d_dec_c0;
  const Mat d_dec_emb =
      stack_backward(p.decoder, f.dec, std::move(d_dec_top), nullptr, nullptr, g.decoder, d_dec_h0,
                     d_dec_c0);
  for (size_t t = 0; t < T; ++t)
    g.tgt_embed.row(f.dec_inputs[t]) += d_dec_emb.col(static_cast<Eigen::Index>(t)).transpose();

  std::vector<Vec> d_enc_h0, d_enc_c0;
  const Mat d_enc_emb = stack_backward(p.encoder, f.enc, std::move(d_memory), &d_dec_h0, &d_dec_c0,
                                       g.encoder, d_enc_h0, d_enc_c0);
  for (size_t t = 0; t < f.src_ids.size(); ++t)
    g.src_embed.row(f.src_ids[t]) += d_enc_emb.col(static_cast<Eigen::Index>(t)).transpose();
}

double batch_loss(const ModelParams& p, const std::vector<IdPair>& batch,
                  const std::vector<std::vector<int>>& wrapped) {
  double nll = 0.0;
  size_t tokens = 0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const FwdCache f = run_forward(p, batch[i].src, wrapped[i], false, 0);
    nll += f.sum_nll;
    tokens += f.targets.size();
  }
  return nll / static_cast<double>(tokens);
}

}  // namespace

std::vector<int> wrap_target(const std::vector<int>& tgt) {
  std::vector<int> out;
  out.reserve(tgt.size() + 2);
  out.push_back(Vocabulary::kBos);
  out.insert(out.end(), tgt.begin(), tgt.end());
  out.push_back(Vocabulary::kEos);
  return out;
}

ForwardResult forward_loss(const ModelParams& params, const std::vector<int>& src,
                           const std::vector<int>& tgt_wrapped, bool train_mode, uint64_t seed) {
  FwdCache f = run_forward(params, src, tgt_wrapped, train_mode, seed);
  ForwardResult r;
  r.num_tokens = f.targets.size();
  r.loss = f.sum_nll / static_cast<double>(r.num_tokens);
  r.attention.rows = std::move(f.alpha);
  return r;
}

double next_lr(const TrainState& state, double new_val_score, const ModelConfig& config) {
  bool decay = state.epoch + 1 > config.decay_start_epoch;
  if (!state.val_history.empty()) {
    const double best = *std::min_element(state.val_history.begin(), state.val_history.end());
    if (new_val_score >= best) decay = true;
  }
  return decay ? state.lr * config.decay_factor : state.lr;
}

TrainResult train(const ModelParams& init, const std::vector<IdPair>& train_pairs,
                  const std::vector<IdPair>& val_pairs) {
  const ModelConfig& cfg = init.config;
  cfg.validate();
  if (train_pairs.empty()) throw Error("training set is empty");
  if (val_pairs.empty()) throw Error("validation set is empty");

  std::vector<std::vector<int>> wrapped(train_pairs.size());
  for (size_t i = 0; i < train_pairs.size(); ++i) wrapped[i] = wrap_target(train_pairs[i].tgt);

  ModelParams params = init;
  ModelParams grads = zeros_like(params);
  auto gviews = param_views(grads);
  auto pviews = param_views(params);

  TrainResult res;
  res.best_val = std::numeric_limits<double>::infinity();
  std::vector<double> val_hist;
  double lr = cfg.initial_lr;

  std::vector<size_t> order(train_pairs.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Rng(mix_seed(cfg.seed, kShuffleSalt, epoch)).shuffle(order);
    double epoch_nll = 0.0;
    size_t epoch_tokens = 0;
    size_t batch_index = 0;
    for (size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size, ++batch_index) {
      for (auto& gv : gviews) gv.mat->setZero();
      double nll = 0.0;
      size_t tokens = 0;
      const size_t b1 = std::min(b0 + cfg.batch_size, order.size());
      for (size_t k = b0; k < b1; ++k) {
        const size_t idx = order[k];
        const uint64_t drop_seed = mix_seed(mix_seed(cfg.seed, kDropSalt, epoch), k);
        FwdCache f = run_forward(params, train_pairs[idx].src, wrapped[idx], true, drop_seed);
        run_backward(params, f, grads);
        nll += f.sum_nll;
        tokens += f.targets.size();
      }
      if (!std::isfinite(nll))
        throw Error("non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                    std::to_string(batch_index));
      const double inv = 1.0 / static_cast<double>(tokens);
      double sq = 0.0;
      for (auto& gv : gviews) {
        *gv.mat *= inv;
        sq += gv.mat->squaredNorm();
      }
      const double norm = std::sqrt(sq);
      if (norm > cfg.clip_norm) {
        const double scale = cfg.clip_norm / norm;
        for (auto& gv : gviews) *gv.mat *= scale;
      }
      for (size_t v = 0; v < pviews.size(); ++v) *pviews[v].mat -= lr * *gviews[v].mat;
      epoch_nll += nll;
      epoch_tokens += tokens;
    }

    const double val = evaluate(params, val_pairs);
    res.history.push_back(
        {epoch, epoch_nll / static_cast<double>(epoch_tokens), val, lr});
    if (val < res.best_val) {
      res.best_val = val;
      res.best_epoch = epoch;
      res.best_params = params;
    }
    if (epoch < cfg.max_epochs) lr = next_lr(TrainState{epoch, lr, val_hist}, val, cfg);
    val_hist.push_back(val);
  }
  res.final_params = std::move(params);
  return res;
}

double evaluate(const ModelParams& params, const std::vector<IdPair>& pairs) {
  if (pairs.empty()) throw Error("evaluation set is empty");
  double nll = 0.0;
  size_t tokens = 0;
  for (const auto& pair : pairs) {
    const FwdCache f = run_forward(params, pair.src, wrap_target(pair.tgt), false, 0);
    nll += f.sum_nll;
    tokens += f.targets.size();
  }
  return nll / static_cast<double>(tokens);
}

DecodeResult decode_greedy(const ModelParams& params, const std::vector<int>& src,
                           size_t max_decode_len) {
  if (src.empty()) throw Error("empty source sequence");
  check_ids(src, params.vocab_size, "source");
  const Eigen::Index H = static_cast<Eigen::Index>(params.config.hidden_dim);
  const size_t L = params.config.num_layers;

  Rng rng(0);
  StackFwd enc = run_stack(params.encoder, embed_lookup(params.src_embed, src), nullptr, nullptr,
                           0.0, false, rng);
  const Mat& memory = enc.layers.back().H;
  const Eigen::Index m = memory.cols();

  std::vector<Vec> h(L), c(L);
  for (size_t l = 0; l < L; ++l) {
    h[l] = enc.layers[l].H.col(m - 1);
    c[l] = enc.layers[l].C.col(m - 1);
  }

  DecodeResult res;
  int prev = Vocabulary::kBos;
  for (size_t step = 0; step < max_decode_len; ++step) {
    Vec x = params.tgt_embed.row(prev).transpose();
    for (size_t l = 0; l < L; ++l) {
      const LstmLayer& layer = params.decoder[l];
      const Vec z = layer.wx * x + layer.wh * h[l] + layer.b.col(0);
      const Vec i = sigmoid(z.head(H));
      const Vec fg = sigmoid(z.segment(H, H));
      const Vec g = z.segment(2 * H, H).array().tanh().matrix();
      const Vec o = sigmoid(z.tail(H));
      c[l] = fg.cwiseProduct(c[l]) + i.cwiseProduct(g);
      h[l] = o.cwiseProduct(c[l].array().tanh().matrix());
      x = h[l];
    }
    const Vec& d = h[L - 1];
    const Vec s = memory.transpose() * (params.attn_w * d);
    const double smax = s.maxCoeff();
    Vec alpha = (s.array() - smax).exp().matrix();
    alpha /= alpha.sum();
    const Vec ctx = memory * alpha;
    const Vec htilde = (params.combine_w.leftCols(H) * d + params.combine_w.rightCols(H) * ctx +
                        params.combine_b.col(0))
                           .array()
                           .tanh()
                           .matrix();
    const Vec logits = params.out_w * htilde + params.out_b.col(0);
    Eigen::Index best = 0;
    logits.maxCoeff(&best);
    res.attention.rows.push_back(std::move(alpha));
    if (static_cast<int>(best) == Vocabulary::kEos) break;
    res.ids.push_back(static_cast<int>(best));
    prev = static_cast<int>(best);
  }
  return res;
}

double gradient_check(const ModelParams& params, const std::vector<IdPair>& batch, double epsilon,
                      uint64_t seed, size_t num_coords) {
  if (batch.empty()) throw Error("gradient check needs a non-empty batch");
  std::vector<std::vector<int>> wrapped(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) wrapped[i] = wrap_target(batch[i].tgt);

  ModelParams work = params;
  ModelParams grads = zeros_like(work);
  size_t tokens = 0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const FwdCache f = run_forward(work, batch[i].src, wrapped[i], false, 0);
    run_backward(work, f, grads);
    tokens += f.targets.size();
  }
  auto gviews = param_views(grads);
  for (auto& gv : gviews) *gv.mat /= static_cast<double>(tokens);

  auto wviews = param_views(work);
  std::vector<size_t> sizes;
  size_t total = 0;
  for (auto& v : wviews) {
    sizes.push_back(static_cast<size_t>(v.mat->size()));
    total += sizes.back();
  }

  Rng rng(mix_seed(seed, kCheckSalt));
  double worst = 0.0;
  for (size_t k = 0; k < num_coords; ++k) {
    size_t linear = rng.uniform_index(total);
    size_t view = 0;
    while (linear >= sizes[view]) {
      linear -= sizes[view];
      ++view;
    }
    double* slot = wviews[view].mat->data() + linear;
    const double saved = *slot;
    *slot = saved + epsilon;
    const double up = batch_loss(work, batch, wrapped);
    *slot = saved - epsilon;
    const double down = batch_loss(work, batch, wrapped);
    *slot = saved;

    const double fd = (up - down) / (2.0 * epsilon);
    const double analytic = gviews[view].mat->data()[linear];
    const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-8});
    worst = std::max(worst, std::abs(fd - analytic) / denom);
  }
  return worst;
}

}  // namespace paramt::seq2seq
