#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace paramt::seq2seq {

using Mat = Eigen::MatrixXd;

// Hyperparameters. Defaults are the full-scale settings; tests and the
// acceptance pipeline swap in desk-scale values through run configs.
struct ModelConfig {
  size_t embed_dim = 600;
  size_t hidden_dim = 1000;
  size_t num_layers = 4;
  double dropout_rate = 0.3;
  size_t batch_size = 64;
  size_t max_epochs = 13;
  double initial_lr = 0.8;
  double decay_factor = 0.7;
  size_t decay_start_epoch = 9;
  double clip_norm = 5.0;
  size_t max_decode_len = 64;
  uint64_t seed = 1;

  void validate() const;
};

// One LSTM layer, gate rows stacked [input; forget; cell; output].
struct LstmLayer {
  Mat wx;  // (4H, input_dim)
  Mat wh;  // (4H, H)
  Mat b;   // (4H, 1)
};

struct ModelParams {
  ModelConfig config;
  size_t vocab_size = 0;
  Mat src_embed;  // (V, E)
  Mat tgt_embed;  // (V, E)
  std::vector<LstmLayer> encoder;  // layer 0 consumes E, upper layers H
  std::vector<LstmLayer> decoder;
  Mat attn_w;     // (H, H) bilinear attention scorer
  Mat combine_w;  // (H, 2H) merges decoder state with context
  Mat combine_b;  // (H, 1)
  Mat out_w;      // (V, H)
  Mat out_b;      // (V, 1)
};

// Named handle on one parameter array; order is fixed and shared by
// initialization, updates, clipping, and checkpoints.
struct ParamView {
  std::string name;
  Mat* mat;
};
std::vector<ParamView> param_views(ModelParams& params);

ModelParams init_params(const ModelConfig& config, size_t vocab_size);
ModelParams zeros_like(const ModelParams& params);

// Text checkpoint: config and shapes in plain decimal, values as C99
// hexfloats so reload is bit-exact. Refuses to load when the stored
// vocabulary digest differs from `expected_vocab_hash` (pass 0 to skip).
void save_checkpoint(const ModelParams& params, uint64_t vocab_hash, const std::string& path);

struct Checkpoint {
  ModelParams params;
  uint64_t vocab_hash = 0;
};
Checkpoint load_checkpoint(const std::string& path, uint64_t expected_vocab_hash = 0);

}  // namespace paramt::seq2seq
