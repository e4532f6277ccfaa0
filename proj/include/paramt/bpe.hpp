#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace paramt::subword {

// A learned merge: two adjacent symbols fused into their concatenation.
// Word-final symbols carry a "</w>" marker internally so merges can tell
// "low" apart from "low-" inside "lower".
struct Merge {
  std::string left;
  std::string right;
};

struct MergeTable {
  std::vector<Merge> merges;
};

using ReservedCheck = std::function<bool(const std::string&)>;

// True for tokens that must stay atomic: path tags plus sentence specials.
bool default_reserved(const std::string& token);

// Learn up to `n_merges` merges from whitespace-tokenized lines. Reserved
// tokens are skipped entirely; they never contribute pair statistics. Stops
// early once no adjacent pair remains. Ties on frequency break toward the
// lexicographically smallest (left, right) pair so learning is reproducible.
MergeTable learn_bpe(const std::vector<std::vector<std::string>>& corpus_tokens, size_t n_merges,
                     const ReservedCheck& reserved = default_reserved);

// Split one word into subword units, replaying merges in learned order.
// Every piece except the last gets an "@@" continuation suffix.
std::vector<std::string> encode_word(const std::string& word, const MergeTable& table);

// Segments token streams, memoizing per word type. Reserved tokens pass
// through unchanged.
class BpeEncoder {
 public:
  explicit BpeEncoder(const MergeTable& table, ReservedCheck reserved = default_reserved);
  std::vector<std::string> encode(const std::vector<std::string>& tokens) const;

 private:
  const MergeTable& table_;
  ReservedCheck reserved_;
  mutable std::map<std::string, std::vector<std::string>> cache_;
};

// One-shot convenience over BpeEncoder.
std::vector<std::string> bpe_encode(const std::vector<std::string>& tokens, const MergeTable& table,
                                    const ReservedCheck& reserved = default_reserved);

// Invert bpe_encode by gluing "@@" pieces. A trailing continuation piece at
// end of sequence is an error.
std::vector<std::string> bpe_decode(const std::vector<std::string>& pieces);

// bpe_decode for model output, which may stop mid-word: a trailing
// continuation piece is kept as a word fragment instead of rejected.
std::vector<std::string> bpe_glue(const std::vector<std::string>& pieces);

void save_merges(const MergeTable& table, const std::string& path);
MergeTable load_merges(const std::string& path);

}  // namespace paramt::subword
