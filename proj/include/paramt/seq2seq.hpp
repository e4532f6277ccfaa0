#pragma once

#include <cstdint>
#include <vector>

#include "paramt/model.hpp"
#include "paramt/vocab.hpp"

namespace paramt::seq2seq {

// One training example in id space. `src` carries the two path tags up
// front; `tgt` is bare (wrapping happens at the training boundary).
struct IdPair {
  std::vector<int> src;
  std::vector<int> tgt;
};

// BOS + ids + EOS, the form forward_loss expects on the target side.
std::vector<int> wrap_target(const std::vector<int>& tgt);

struct AttentionRecord {
  // One weight vector over source positions per decoded step.
  std::vector<Eigen::VectorXd> rows;
};

struct ForwardResult {
  double loss = 0.0;  // mean negative log-likelihood per predicted token
  size_t num_tokens = 0;
  AttentionRecord attention;
};

// Teacher-forced scoring pass. tgt_wrapped must start with BOS and end with
// EOS. train_mode enables dropout, with masks drawn from `seed`; evaluation
// mode is deterministic and ignores the seed.
ForwardResult forward_loss(const ModelParams& params, const std::vector<int>& src,
                           const std::vector<int>& tgt_wrapped, bool train_mode, uint64_t seed);

struct TrainState {
  size_t epoch = 0;  // completed epochs, 1-based counting
  double lr = 0.0;
  std::vector<double> val_history;  // epochs before the one just scored
};

// Learning rate for the epoch about to start. Decays when that epoch index
// exceeds decay_start_epoch, or when new_val_score failed to improve on the
// best previous validation loss.
double next_lr(const TrainState& state, double new_val_score, const ModelConfig& config);

struct EpochRecord {
  size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;  // rate used during this epoch
};

struct TrainResult {
  ModelParams final_params;
  ModelParams best_params;  // lowest validation loss, earliest on ties
  size_t best_epoch = 0;
  double best_val = 0.0;
  std::vector<EpochRecord> history;
};

// Minibatch SGD with per-epoch seeded shuffling, gradient-norm clipping and
// the decay schedule above. Deterministic per (init params, data, seed).
TrainResult train(const ModelParams& init, const std::vector<IdPair>& train_pairs,
                  const std::vector<IdPair>& val_pairs);

// Corpus mean per-token loss, dropout disabled.
double evaluate(const ModelParams& params, const std::vector<IdPair>& pairs);

struct DecodeResult {
  std::vector<int> ids;  // BOS/EOS stripped
  AttentionRecord attention;
};

DecodeResult decode_greedy(const ModelParams& params, const std::vector<int>& src,
                           size_t max_decode_len);

// Central finite differences against the analytic batch gradient on
// `num_coords` seeded parameter coordinates; returns the worst relative
// error. Dropout is disabled throughout.
double gradient_check(const ModelParams& params, const std::vector<IdPair>& batch, double epsilon,
                      uint64_t seed, size_t num_coords = 200);

}  // namespace paramt::seq2seq
