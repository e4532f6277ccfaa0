#include "paramt/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "paramt/error.hpp"
#include "paramt/rng.hpp"
#include "paramt/text.hpp"

namespace paramt {

ParaphraseId ParaphraseId::parse(const std::string& s) {
  size_t i = 0;
  while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
  if (i == 0 || i == s.size())
    throw Error("bad paraphrase id '" + s + "': expected <lang><version>, e.g. f0");
  for (size_t j = i; j < s.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(s[j])))
      throw Error("bad paraphrase id '" + s + "': version must be a non-negative integer");
  return ParaphraseId{s.substr(0, i), std::stoi(s.substr(i))};
}

namespace corpus {

const ParaphraseCorpus& AlignedCorpus::by_id(const ParaphraseId& id) const {
  for (const auto& c : corpora)
    if (c.id == id) return c;
  throw Error("paraphrase '" + id.render() + "' not present in aligned corpus");
}

bool AlignedCorpus::has_id(const ParaphraseId& id) const {
  for (const auto& c : corpora)
    if (c.id == id) return true;
  return false;
}

ParaphraseCorpus load_corpus(const std::string& path, const ParaphraseId& id) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file " + path);
  ParaphraseCorpus c;
  c.id = id;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(path + ":" + std::to_string(lineno) + ": malformed record, expected <verse_key>\\t<sentence>");
    std::string key = line.substr(0, tab);
    std::string text = rtrim(line.substr(tab + 1));
    if (key.empty())
      throw Error(path + ":" + std::to_string(lineno) + ": empty verse key");
    if (text.empty())
      throw Error(path + ":" + std::to_string(lineno) + ": empty sentence for key '" + key + "'");
    if (!c.verses.emplace(std::move(key), std::move(text)).second)
      throw Error(path + ":" + std::to_string(lineno) + ": duplicate verse key '" + line.substr(0, tab) + "'");
  }
  if (c.verses.empty()) throw Error("corpus file " + path + " contains no records");
  return c;
}

void save_corpus(const ParaphraseCorpus& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file " + path);
  for (const auto& [key, text] : c.verses) out << key << '\t' << text << '\n';
  if (!out) throw Error("write failed for " + path);
}

AlignResult align_corpora(const std::vector<ParaphraseCorpus>& corpora) {
  if (corpora.size() < 2) throw Error("alignment requires at least two corpora");
  for (size_t i = 0; i < corpora.size(); ++i)
    for (size_t j = i + 1; j < corpora.size(); ++j)
      if (corpora[i].id == corpora[j].id)
        throw Error("duplicate paraphrase id '" + corpora[i].id.render() + "' in alignment input");

  // Intersection of key sets; std::map iteration keeps everything lexicographic.
  std::map<VerseKey, size_t> counts;
  for (const auto& c : corpora)
    for (const auto& [key, _] : c.verses) counts[key]++;

  AlignResult result;
  for (const auto& [key, n] : counts)
    if (n == corpora.size()) result.aligned.keys.push_back(key);
  if (result.aligned.keys.empty())
    throw Error("alignment produced an empty key intersection");

  for (const auto& c : corpora) {
    ParaphraseCorpus restricted;
    restricted.id = c.id;
    for (const auto& [key, text] : c.verses) {
      if (counts[key] == corpora.size())
        restricted.verses.emplace(key, text);
      else
        result.dropped.push_back(DropRecord{key, c.id.render()});
    }
    result.aligned.corpora.push_back(std::move(restricted));
  }
  return result;
}

void write_drop_report(const std::vector<DropRecord>& drops, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write drop report " + path);
  for (const auto& d : drops) out << d.key << '\t' << d.paraphrase << '\n';
}

DataSplit split_corpus(const AlignedCorpus& aligned, uint64_t seed) {
  const size_t k = aligned.keys.size();
  if (k < 10)
    throw Error("split requires at least 10 aligned keys, got " + std::to_string(k));
  std::vector<VerseKey> keys = aligned.keys;
  std::sort(keys.begin(), keys.end());  // independent of upstream ordering
  Rng rng(seed);
  rng.shuffle(keys);

  // floor(0.75 k) and floor(0.15 k) in exact integer arithmetic
  const size_t n_train = 75 * k / 100;
  const size_t n_val = 15 * k / 100;
  DataSplit split;
  split.seed = seed;
  split.train.assign(keys.begin(), keys.begin() + n_train);
  split.validation.assign(keys.begin() + n_train, keys.begin() + n_train + n_val);
  split.test.assign(keys.begin() + n_train + n_val, keys.end());
  return split;
}

void write_key_list(const std::vector<VerseKey>& keys, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write key list " + path);
  for (const auto& key : keys) out << key << '\n';
}

std::vector<VerseKey> read_key_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open key list " + path);
  std::vector<VerseKey> keys;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) keys.push_back(line);
  }
  return keys;
}

}  // namespace corpus
}  // namespace paramt
