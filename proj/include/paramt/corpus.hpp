#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace paramt {

// One translation version of the corpus, e.g. "f0" or "e11".
struct ParaphraseId {
  std::string lang;  // short language code, lowercase letters
  int version = 0;   // non-negative

  std::string render() const { return lang + std::to_string(version); }
  static ParaphraseId parse(const std::string& s);

  bool operator==(const ParaphraseId& o) const { return lang == o.lang && version == o.version; }
  bool operator!=(const ParaphraseId& o) const { return !(*this == o); }
  bool operator<(const ParaphraseId& o) const { return render() < o.render(); }
};

namespace corpus {

// Alignment unit identifier shared across all paraphrase corpora.
using VerseKey = std::string;

struct ParaphraseCorpus {
  ParaphraseId id;
  std::map<VerseKey, std::string> verses;  // key -> whitespace-tokenizable sentence
};

// Corpora restricted to their common key set, in lexicographic key order.
struct AlignedCorpus {
  std::vector<VerseKey> keys;
  std::vector<ParaphraseCorpus> corpora;

  const ParaphraseCorpus& by_id(const ParaphraseId& id) const;
  bool has_id(const ParaphraseId& id) const;
};

struct DropRecord {
  VerseKey key;
  std::string paraphrase;  // rendered id of the corpus the verse was dropped from
};

struct AlignResult {
  AlignedCorpus aligned;
  std::vector<DropRecord> dropped;
};

struct DataSplit {
  std::vector<VerseKey> train, validation, test;
  uint64_t seed = 0;
};

// File format: one record per line, "<verse_key>\t<sentence>", UTF-8,
// blank lines ignored. Sentence text is kept byte-exact apart from a
// trailing-whitespace trim.
ParaphraseCorpus load_corpus(const std::string& path, const ParaphraseId& id);
void save_corpus(const ParaphraseCorpus& c, const std::string& path);

// Key set of the result is the intersection of all input key sets; verses
// outside it are dropped and reported. Requires >= 2 corpora with distinct
// ids and a non-empty intersection.
AlignResult align_corpora(const std::vector<ParaphraseCorpus>& corpora);

void write_drop_report(const std::vector<DropRecord>& drops, const std::string& path);

// Seeded shuffle of the aligned keys, then a 0.75 / 0.15 / 0.10 partition
// (floor for train and validation, remainder to test). Requires >= 10 keys.
DataSplit split_corpus(const AlignedCorpus& aligned, uint64_t seed);

void write_key_list(const std::vector<VerseKey>& keys, const std::string& path);
std::vector<VerseKey> read_key_list(const std::string& path);

}  // namespace corpus
}  // namespace paramt
