#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paramt/corpus.hpp"

namespace paramt::pathgen {

enum class TagSide { source, target };

// Reserved atomic token prepended to source sentences, e.g. "__opt_src_f0".
// Tag tokens never pass through subword segmentation.
struct TagToken {
  TagSide side;
  ParaphraseId id;
  std::string rendered;
};

TagToken make_tag(const ParaphraseId& id, TagSide side);

inline bool is_tag_token(const std::string& tok) {
  return tok.rfind("__opt_src_", 0) == 0 || tok.rfind("__opt_tgt_", 0) == 0;
}

// Ordered (source paraphrase, target paraphrase) pair; one training direction.
struct TranslationPath {
  ParaphraseId src, tgt;

  std::string render() const { return src.render() + "-" + tgt.render(); }
  bool operator==(const TranslationPath& o) const { return src == o.src && tgt == o.tgt; }
  bool operator<(const TranslationPath& o) const {
    if (src.render() != o.src.render()) return src.render() < o.src.render();
    return tgt.render() < o.tgt.render();
  }
};

enum class PathPolicy { all_pairs, cross_lingual_only };

// Every ordered pair with src != tgt (N*(N-1) under all_pairs); under
// cross_lingual_only only pairs whose ids differ in language. Output is in
// lexicographic order over rendered ids.
std::vector<TranslationPath> enumerate_paths(std::vector<ParaphraseId> members, PathPolicy policy);

// One training example: tagged source token sequence plus target tokens.
struct TaggedPair {
  TranslationPath path;
  corpus::VerseKey key;
  std::vector<std::string> source_tokens;  // [src_tag, tgt_tag, sentence...]
  std::vector<std::string> target_tokens;  // sentence only, never tagged
};

enum class ConfigKind { Single, Vsrc, Vtgt, Vmix, Multilingual };

std::string kind_name(ConfigKind k);
ConfigKind kind_from_name(const std::string& name);

struct ExperimentConfig {
  ConfigKind kind = ConfigKind::Single;
  std::vector<ParaphraseId> members;
  TranslationPath eval_path;
  std::optional<size_t> budget;  // unique-sentence (tagged pair) count
  PathPolicy path_policy = PathPolicy::all_pairs;
  uint64_t seed = 0;

  void validate() const;
};

// One TaggedPair per key for a single path, keys sorted lexicographically.
std::vector<TaggedPair> assemble_path(const corpus::AlignedCorpus& aligned,
                                      const std::vector<corpus::VerseKey>& split_keys,
                                      const TranslationPath& path);

// One TaggedPair per (path, key); output in lexicographic (path, key) order.
std::vector<TaggedPair> assemble_dataset(const corpus::AlignedCorpus& aligned,
                                         const std::vector<corpus::VerseKey>& split_keys,
                                         const ExperimentConfig& config);

// Stratified uniform downsample to exactly `budget` pairs: per-path seeded
// shuffle, round-robin across paths in enumeration order, then the canonical
// (path, key) order is restored. budget == size is the identity.
std::vector<TaggedPair> equalize_budget(const std::vector<TaggedPair>& pairs, size_t budget,
                                        uint64_t seed);

// Parallel text files, one tokenized sentence per line; source lines begin
// with the two tag tokens.
void write_parallel_files(const std::vector<TaggedPair>& pairs, const std::string& src_path,
                          const std::string& tgt_path);
struct ParallelLines {
  std::vector<std::vector<std::string>> src, tgt;
};
ParallelLines read_parallel_files(const std::string& src_path, const std::string& tgt_path);

}  // namespace paramt::pathgen
