#include "paramt/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "paramt/error.hpp"
#include "paramt/rng.hpp"

namespace paramt::synth {
namespace {

constexpr uint64_t kBaseSalt = 0xBA5E;
constexpr uint64_t kCorpusSalt = 0xC0;

const char* kSylF[8] = {"ba", "re", "mi", "ton", "sur", "ble", "eau", "oir"};
const char* kSylE[10] = {"ran", "del", "ost", "wic", "ham", "ley", "ford", "by", "ing", "sted"};

// Surface forms are opaque: the (class, member) index is scrambled by a
// bijection before syllable decomposition, so members of one class share no
// visible stem and synonymy is learnable only from data.
std::string surface(bool target_side, size_t cls, size_t member, size_t class_size) {
  size_t idx = cls * class_size + member;
  std::string w;
  if (target_side) {
    idx = (idx * 777 + 31) % 1000;
    for (int k = 0; k < 3; ++k) {
      w += kSylE[idx % 10];
      idx /= 10;
    }
  } else {
    idx = (idx * 2654435761u) % 512;
    for (int k = 0; k < 3; ++k) {
      w += kSylF[idx % 8];
      idx /= 8;
    }
  }
  return w;
}

struct Occurrence {
  size_t cls;
  size_t member;
};

}  // namespace

void SynthSpec::validate() const {
  if (vocab_size == 0 || num_keys == 0 || paraphrases_per_side == 0)
    throw Error("synthetic spec counts must be positive");
  if (class_size == 0 || vocab_size % class_size != 0)
    throw Error("vocab_size must be a positive multiple of class_size");
  if (!(substitution_rate >= 0.0 && substitution_rate <= 1.0))
    throw Error("substitution rate must lie in [0,1]");
  if (!(rare_member_rate >= 0.0 && rare_member_rate <= 1.0))
    throw Error("rare_member_rate must lie in [0,1]");
  if (!(member_preference >= 0.0 && member_preference <= 1.0))
    throw Error("member_preference must lie in [0,1]");
  if (min_len == 0 || max_len < min_len) throw Error("sentence length bounds invalid");
  const size_t n_classes = vocab_size / class_size;
  // surface() scrambles within fixed tables; keep the index space inside them
  if (n_classes * class_size > 512)
    throw Error("vocab_size above 512 surfaces per language is not supported");
}

std::vector<std::string> generate_synthetic(const SynthSpec& spec, const std::string& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);

  const size_t n_classes = spec.vocab_size / spec.class_size;
  const size_t K = spec.class_size;

  // Zipf CDF over classes.
  std::vector<double> cdf(n_classes);
  double z = 0.0;
  for (size_t c = 0; c < n_classes; ++c) z += 1.0 / std::pow(static_cast<double>(c + 1), spec.zipf_s);
  double acc = 0.0;
  for (size_t c = 0; c < n_classes; ++c) {
    acc += 1.0 / std::pow(static_cast<double>(c + 1), spec.zipf_s) / z;
    cdf[c] = acc;
  }
  cdf.back() = 1.0;

  // Base occurrence stream, shared by every corpus on both sides.
  Rng base_rng(mix_seed(spec.seed, kBaseSalt));
  std::vector<std::vector<Occurrence>> base(spec.num_keys);
  for (auto& sentence : base) {
    const size_t len =
        spec.min_len + base_rng.uniform_index(spec.max_len - spec.min_len + 1);
    sentence.resize(len);
    for (auto& occ : sentence) {
      const double u = base_rng.uniform_real();
      occ.cls = static_cast<size_t>(
          std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      if (occ.cls >= n_classes) occ.cls = n_classes - 1;
      occ.member =
          base_rng.uniform_real() < spec.rare_member_rate ? 1 + base_rng.uniform_index(K - 1) : 0;
    }
  }

  size_t key_width = 4;
  for (size_t n = spec.num_keys; n > 9999; n /= 10) ++key_width;
  auto verse_key = [&](size_t k) {
    std::string digits = std::to_string(k);
    if (digits.size() < key_width) digits.insert(0, key_width - digits.size(), '0');
    return "v" + digits;
  };

  // Member stream per paraphrase index, shared by the two languages: f_j and
  // e_j render the same stream, so every (f_j, e_j) pair stays a word-for-word
  // translation while cross-index paths disagree exactly where substitution
  // rewrote a member. Index 0 substitutes uniformly; index j leans on its own
  // member, giving the extra corpora complementary coverage of rare members.
  std::vector<std::vector<std::vector<size_t>>> streams(spec.paraphrases_per_side);
  for (size_t j = 0; j < spec.paraphrases_per_side; ++j) {
    Rng rng(mix_seed(spec.seed, kCorpusSalt, j));
    auto& stream = streams[j];
    stream.resize(spec.num_keys);
    for (size_t k = 0; k < spec.num_keys; ++k) {
      stream[k].resize(base[k].size());
      for (size_t t = 0; t < base[k].size(); ++t) {
        size_t member = base[k][t].member;
        if (rng.uniform_real() < spec.substitution_rate) {
          if (j > 0 && rng.uniform_real() < spec.member_preference)
            member = j % K;
          else
            member = rng.uniform_index(K);
        }
        stream[k][t] = member;
      }
    }
  }

  std::vector<std::string> files;
  for (int side = 0; side < 2; ++side) {
    const bool target_side = side == 1;
    for (size_t j = 0; j < spec.paraphrases_per_side; ++j) {
      const std::string name = std::string(target_side ? "e" : "f") + std::to_string(j) + ".tsv";
      const std::string path = (std::filesystem::path(out_dir) / name).string();
      std::ofstream out(path);
      if (!out) throw Error("cannot write synthetic corpus " + path);

      for (size_t k = 0; k < spec.num_keys; ++k) {
        out << verse_key(k + 1) << '\t';
        for (size_t t = 0; t < base[k].size(); ++t) {
          if (t) out << ' ';
          out << surface(target_side, base[k][t].cls, streams[j][k][t], K);
        }
        out << '\n';
      }
      if (!out) throw Error("failed writing synthetic corpus " + path);
      files.push_back(path);
    }
  }
  return files;
}

}  // namespace paramt::synth
