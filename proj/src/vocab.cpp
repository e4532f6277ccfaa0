#include "paramt/vocab.hpp"

#include <algorithm>
#include <fstream>

#include "paramt/error.hpp"
#include "paramt/rng.hpp"
#include "paramt/text.hpp"

namespace paramt::subword {
namespace {

const char* kSpecials[Vocabulary::kNumSpecials] = {"<pad>", "<s>", "</s>", "<unk>"};

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < kNumSpecials) throw Error("vocabulary too small for special tokens");
  for (size_t i = 0; i < kNumSpecials; ++i)
    if (tokens_[i] != kSpecials[i])
      throw Error("vocabulary slot " + std::to_string(i) + " must be " + kSpecials[i]);
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (!ids_.emplace(tokens_[i], static_cast<int>(i)).second)
      throw Error("duplicate vocabulary token '" + tokens_[i] + "'");
    if (pathgen::is_tag_token(tokens_[i])) ++n_tags_;
  }
}

int Vocabulary::id_of(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
  if (id < 0 || static_cast<size_t>(id) >= tokens_.size())
    throw Error("token id " + std::to_string(id) + " out of range");
  return tokens_[static_cast<size_t>(id)];
}

std::vector<int> Vocabulary::to_ids(const std::vector<std::string>& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id_of(t));
  return out;
}

std::vector<std::string> Vocabulary::to_tokens(const std::vector<int>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(token_of(id));
  return out;
}

uint64_t Vocabulary::hash() const {
  uint64_t h = fnv1a(nullptr, 0);
  for (const auto& t : tokens_) {
    h = fnv1a(t.data(), t.size(), h);
    const char sep = '\x1f';
    h = fnv1a(&sep, 1, h);
  }
  return h;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& encoded_lines,
                       size_t size_cap) {
  std::map<std::string, int64_t> freq;
  std::map<std::string, bool> seen_tag;
  for (const auto& line : encoded_lines)
    for (const auto& tok : line) {
      if (pathgen::is_tag_token(tok))
        seen_tag[tok] = true;
      else
        ++freq[tok];
    }

  std::vector<std::string> tokens;
  for (const auto* s : kSpecials) tokens.emplace_back(s);
  for (const auto& [tag, _] : seen_tag) tokens.push_back(tag);

  if (size_cap < tokens.size())
    throw Error("vocabulary cap " + std::to_string(size_cap) + " below specials + tags (" +
                std::to_string(tokens.size()) + ")");

  std::vector<std::pair<std::string, int64_t>> by_freq(freq.begin(), freq.end());
  std::stable_sort(by_freq.begin(), by_freq.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [tok, _] : by_freq) {
    if (tokens.size() == size_cap) break;
    tokens.push_back(tok);
  }
  return Vocabulary(std::move(tokens));
}

Vocabulary build_vocab(const std::vector<pathgen::TaggedPair>& dataset, const MergeTable& table,
                       size_t size_cap) {
  BpeEncoder encoder(table);
  std::vector<std::vector<std::string>> lines;
  lines.reserve(dataset.size() * 2);
  for (const auto& pair : dataset) {
    lines.push_back(encoder.encode(pair.source_tokens));
    lines.push_back(encoder.encode(pair.target_tokens));
  }
  return build_vocab(lines, size_cap);
}

void save_vocab(const Vocabulary& vocab, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write vocabulary " + path);
  for (size_t i = 0; i < vocab.size(); ++i)
    out << vocab.token_of(static_cast<int>(i)) << '\t' << i << '\n';
  if (!out) throw Error("failed writing vocabulary " + path);
}

Vocabulary load_vocab(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary " + path);
  std::vector<std::string> tokens;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error("vocabulary " + path + " line " + std::to_string(lineno) + ": missing tab");
    const std::string tok = line.substr(0, tab);
    const std::string id_text = line.substr(tab + 1);
    size_t pos = 0;
    const long id = std::stol(id_text, &pos);
    if (pos != id_text.size() || id < 0 || static_cast<size_t>(id) != tokens.size())
      throw Error("vocabulary " + path + " line " + std::to_string(lineno) +
                  ": ids must be dense from 0");
    tokens.push_back(tok);
  }
  return Vocabulary(std::move(tokens));
}

}  // namespace paramt::subword
