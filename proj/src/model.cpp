#include "paramt/model.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "paramt/error.hpp"
#include "paramt/rng.hpp"

namespace paramt::seq2seq {
namespace {

// Distinct stream for initialization so training draws stay independent of
// parameter count.
constexpr uint64_t kInitSalt = 0x9e11ULL;

}  // namespace

void ModelConfig::validate() const {
  if (embed_dim < 1 || hidden_dim < 1 || num_layers < 1) throw Error("model dims must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw Error("dropout must lie in [0,1)");
  if (batch_size < 1) throw Error("batch size must be >= 1");
  if (max_epochs < 1) throw Error("max epochs must be >= 1");
  if (!(initial_lr > 0.0)) throw Error("initial learning rate must be positive");
  if (!(decay_factor > 0.0 && decay_factor <= 1.0)) throw Error("decay factor must lie in (0,1]");
  if (!(clip_norm > 0.0)) throw Error("clip norm must be positive");
}

std::vector<ParamView> param_views(ModelParams& p) {
  std::vector<ParamView> views;
  views.push_back({"src_embed", &p.src_embed});
  views.push_back({"tgt_embed", &p.tgt_embed});
  auto add_stack = [&](const char* prefix, std::vector<LstmLayer>& layers) {
    for (size_t l = 0; l < layers.size(); ++l) {
      const std::string base = std::string(prefix) + std::to_string(l) + "_";
      views.push_back({base + "wx", &layers[l].wx});
      views.push_back({base + "wh", &layers[l].wh});
      views.push_back({base + "b", &layers[l].b});
    }
  };
  add_stack("enc", p.encoder);
  add_stack("dec", p.decoder);
  views.push_back({"attn_w", &p.attn_w});
  views.push_back({"combine_w", &p.combine_w});
  views.push_back({"combine_b", &p.combine_b});
  views.push_back({"out_w", &p.out_w});
  views.push_back({"out_b", &p.out_b});
  return views;
}

ModelParams init_params(const ModelConfig& config, size_t vocab_size) {
  config.validate();
  if (vocab_size < 5) throw Error("vocabulary too small to train on");

  ModelParams p;
  p.config = config;
  p.vocab_size = vocab_size;
  const auto V = static_cast<Eigen::Index>(vocab_size);
  const auto E = static_cast<Eigen::Index>(config.embed_dim);
  const auto H = static_cast<Eigen::Index>(config.hidden_dim);

  p.src_embed.resize(V, E);
  p.tgt_embed.resize(V, E);
  auto make_stack = [&](std::vector<LstmLayer>& layers) {
    layers.resize(config.num_layers);
    for (size_t l = 0; l < layers.size(); ++l) {
      const Eigen::Index in = l == 0 ? E : H;
      layers[l].wx.resize(4 * H, in);
      layers[l].wh.resize(4 * H, H);
      layers[l].b.resize(4 * H, 1);
    }
  };
  make_stack(p.encoder);
  make_stack(p.decoder);
  p.attn_w.resize(H, H);
  p.combine_w.resize(H, 2 * H);
  p.combine_b.resize(H, 1);
  p.out_w.resize(V, H);
  p.out_b.resize(V, 1);

  Rng rng(mix_seed(config.seed, kInitSalt));
  for (auto& view : param_views(p)) {
    double* data = view.mat->data();
    const Eigen::Index n = view.mat->size();
    for (Eigen::Index i = 0; i < n; ++i) data[i] = rng.uniform_real(-0.1, 0.1);
  }
  return p;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams z = params;
  for (auto& view : param_views(z)) view.mat->setZero();
  return z;
}

void save_checkpoint(const ModelParams& params, uint64_t vocab_hash, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path);
  char buf[64];
  auto put_real = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s %a\n", key, v);
    out << buf;
  };
  const ModelConfig& c = params.config;
  out << "paramt checkpoint 1\n";
  std::snprintf(buf, sizeof(buf), "vocab_hash %016" PRIx64 "\n", vocab_hash);
  out << buf;
  out << "embed_dim " << c.embed_dim << '\n';
  out << "hidden_dim " << c.hidden_dim << '\n';
  out << "num_layers " << c.num_layers << '\n';
  put_real("dropout_rate", c.dropout_rate);
  out << "batch_size " << c.batch_size << '\n';
  out << "max_epochs " << c.max_epochs << '\n';
  put_real("initial_lr", c.initial_lr);
  put_real("decay_factor", c.decay_factor);
  out << "decay_start_epoch " << c.decay_start_epoch << '\n';
  put_real("clip_norm", c.clip_norm);
  out << "max_decode_len " << c.max_decode_len << '\n';
  out << "seed " << c.seed << '\n';
  out << "vocab_size " << params.vocab_size << '\n';

  auto views = param_views(const_cast<ModelParams&>(params));
  out << "arrays " << views.size() << '\n';
  for (const auto& view : views) {
    out << "array " << view.name << ' ' << view.mat->rows() << ' ' << view.mat->cols() << '\n';
    for (Eigen::Index r = 0; r < view.mat->rows(); ++r) {
      for (Eigen::Index col = 0; col < view.mat->cols(); ++col) {
        std::snprintf(buf, sizeof(buf), "%s%a", col ? " " : "", (*view.mat)(r, col));
        out << buf;
      }
      out << '\n';
    }
  }
  if (!out) throw Error("failed writing checkpoint " + path);
}

namespace {

std::string expect_key(std::istream& in, const std::string& key) {
  std::string k, v;
  if (!(in >> k >> v) || k != key)
    throw Error("checkpoint parse error: expected '" + key + "', got '" + k + "'");
  return v;
}

uint64_t parse_u64(const std::string& s) {
  return std::strtoull(s.c_str(), nullptr, 10);
}

double parse_real(const std::string& s) {
  // strtod handles the %a hexfloat form; istream extraction does not.
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

Checkpoint load_checkpoint(const std::string& path, uint64_t expected_vocab_hash) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint " + path);
  std::string line;
  if (!std::getline(in, line) || line != "paramt checkpoint 1")
    throw Error("unrecognized checkpoint header in " + path);

  Checkpoint ckpt;
  ckpt.vocab_hash = std::strtoull(expect_key(in, "vocab_hash").c_str(), nullptr, 16);
  if (expected_vocab_hash != 0 && ckpt.vocab_hash != expected_vocab_hash)
    throw Error("checkpoint " + path + " was trained under a different vocabulary");

  ModelConfig c;
  c.embed_dim = parse_u64(expect_key(in, "embed_dim"));
  c.hidden_dim = parse_u64(expect_key(in, "hidden_dim"));
  c.num_layers = parse_u64(expect_key(in, "num_layers"));
  c.dropout_rate = parse_real(expect_key(in, "dropout_rate"));
  c.batch_size = parse_u64(expect_key(in, "batch_size"));
  c.max_epochs = parse_u64(expect_key(in, "max_epochs"));
  c.initial_lr = parse_real(expect_key(in, "initial_lr"));
  c.decay_factor = parse_real(expect_key(in, "decay_factor"));
  c.decay_start_epoch = parse_u64(expect_key(in, "decay_start_epoch"));
  c.clip_norm = parse_real(expect_key(in, "clip_norm"));
  c.max_decode_len = parse_u64(expect_key(in, "max_decode_len"));
  c.seed = parse_u64(expect_key(in, "seed"));
  const size_t vocab_size = parse_u64(expect_key(in, "vocab_size"));

  ModelParams shaped = init_params(c, vocab_size);
  ckpt.params = zeros_like(shaped);
  auto views = param_views(ckpt.params);

  const size_t n_arrays = parse_u64(expect_key(in, "arrays"));
  if (n_arrays != views.size())
    throw Error("checkpoint " + path + " holds " + std::to_string(n_arrays) + " arrays, expected " +
                std::to_string(views.size()));
  for (auto& view : views) {
    std::string tag, name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> tag >> name >> rows >> cols) || tag != "array")
      throw Error("checkpoint parse error before array '" + view.name + "'");
    if (name != view.name || rows != view.mat->rows() || cols != view.mat->cols())
      throw Error("checkpoint array '" + name + "' does not match expected '" + view.name + "' (" +
                  std::to_string(view.mat->rows()) + "x" + std::to_string(view.mat->cols()) + ")");
    std::string value;
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index col = 0; col < cols; ++col) {
        if (!(in >> value)) throw Error("checkpoint truncated inside array '" + name + "'");
        (*view.mat)(r, col) = parse_real(value);
      }
  }
  return ckpt;
}

}  // namespace paramt::seq2seq
