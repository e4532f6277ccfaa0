#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "paramt/bpe.hpp"
#include "paramt/pathgen.hpp"

namespace paramt::subword {

// Shared source/target token inventory. Fixed layout: the four specials,
// then every tag token in lexicographic order, then subword types by
// descending frequency (ties lexicographic). Lookup of unknown tokens falls
// back to UNK.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr size_t kNumSpecials = 4;

  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  int id_of(const std::string& token) const;
  const std::string& token_of(int id) const;
  size_t size() const { return tokens_.size(); }
  size_t num_tags() const { return n_tags_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int> to_ids(const std::vector<std::string>& tokens) const;
  std::vector<std::string> to_tokens(const std::vector<int>& ids) const;

  // Stable digest of the full token list; checkpoints refuse to load under a
  // different vocabulary.
  uint64_t hash() const;

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int> ids_;
  size_t n_tags_ = 0;
};

// Count subword frequencies over already-encoded lines and lay out the
// vocabulary. Tags are recognized by their prefix. size_cap bounds the total
// size; it must leave room for specials and tags.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& encoded_lines, size_t size_cap);

// Encode the dataset's source and target streams with `table`, then build.
Vocabulary build_vocab(const std::vector<pathgen::TaggedPair>& dataset, const MergeTable& table,
                       size_t size_cap);

void save_vocab(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocab(const std::string& path);

}  // namespace paramt::subword
