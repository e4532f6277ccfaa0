#include "paramt/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <utility>

#include "paramt/error.hpp"
#include "paramt/pathgen.hpp"
#include "paramt/text.hpp"

namespace paramt::subword {
namespace {

const std::string kEndOfWord = "</w>";
const std::string kContinue = "@@";

std::vector<std::string> word_symbols(const std::string& word) {
  auto syms = split_codepoints(word);
  if (syms.empty()) throw Error("cannot segment empty word");
  syms.back() += kEndOfWord;
  return syms;
}

// Replace every non-overlapping left,right adjacency by the fused symbol.
void apply_merge(std::vector<std::string>& syms, const Merge& m) {
  size_t w = 0;
  for (size_t r = 0; r < syms.size();) {
    if (r + 1 < syms.size() && syms[r] == m.left && syms[r + 1] == m.right) {
      syms[w++] = m.left + m.right;
      r += 2;
    } else {
      if (w != r) syms[w] = std::move(syms[r]);
      ++w;
      ++r;
    }
  }
  syms.resize(w);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<std::string> render_pieces(const std::vector<std::string>& syms) {
  std::vector<std::string> out;
  out.reserve(syms.size());
  for (size_t i = 0; i < syms.size(); ++i) {
    if (i + 1 == syms.size()) {
      if (!ends_with(syms[i], kEndOfWord))
        throw Error("internal: segmented word lost its end marker");
      out.push_back(syms[i].substr(0, syms[i].size() - kEndOfWord.size()));
    } else {
      out.push_back(syms[i] + kContinue);
    }
  }
  return out;
}

}  // namespace

bool default_reserved(const std::string& token) {
  if (pathgen::is_tag_token(token)) return true;
  return token == "<pad>" || token == "<s>" || token == "</s>" || token == "<unk>";
}

MergeTable learn_bpe(const std::vector<std::vector<std::string>>& corpus_tokens, size_t n_merges,
                     const ReservedCheck& reserved) {
  std::map<std::string, int64_t> freq;
  for (const auto& line : corpus_tokens)
    for (const auto& tok : line)
      if (!reserved(tok)) ++freq[tok];

  struct WordEntry {
    std::vector<std::string> syms;
    int64_t freq;
  };
  std::vector<WordEntry> words;
  words.reserve(freq.size());
  for (const auto& [word, n] : freq) words.push_back({word_symbols(word), n});

  using Pair = std::pair<std::string, std::string>;
  std::map<Pair, int64_t> counts;
  std::map<Pair, std::set<size_t>> where;

  auto add_word = [&](size_t idx, int64_t sign) {
    const auto& w = words[idx];
    for (size_t i = 0; i + 1 < w.syms.size(); ++i) {
      Pair p{w.syms[i], w.syms[i + 1]};
      int64_t& c = counts[p];
      c += sign * w.freq;
      if (sign > 0) {
        where[p].insert(idx);
      } else if (c <= 0) {
        counts.erase(p);
        where.erase(p);
      }
    }
  };
  for (size_t i = 0; i < words.size(); ++i) add_word(i, +1);

  MergeTable table;
  while (table.merges.size() < n_merges && !counts.empty()) {
    // counts iterates in lexicographic pair order, so keeping the first
    // strict maximum implements the lexicographic tie-break.
    auto best = counts.begin();
    for (auto it = std::next(counts.begin()); it != counts.end(); ++it)
      if (it->second > best->second) best = it;

    const Merge m{best->first.first, best->first.second};
    const std::set<size_t> touched = where[best->first];
    for (size_t idx : touched) {
      add_word(idx, -1);
      apply_merge(words[idx].syms, m);
      add_word(idx, +1);
    }
    table.merges.push_back(m);
  }
  return table;
}

std::vector<std::string> encode_word(const std::string& word, const MergeTable& table) {
  auto syms = word_symbols(word);
  for (const auto& m : table.merges) {
    if (syms.size() < 2) break;
    apply_merge(syms, m);
  }
  return render_pieces(syms);
}

BpeEncoder::BpeEncoder(const MergeTable& table, ReservedCheck reserved)
    : table_(table), reserved_(std::move(reserved)) {}

std::vector<std::string> BpeEncoder::encode(const std::vector<std::string>& tokens) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    if (reserved_(tok)) {
      out.push_back(tok);
      continue;
    }
    auto it = cache_.find(tok);
    if (it == cache_.end()) it = cache_.emplace(tok, encode_word(tok, table_)).first;
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

std::vector<std::string> bpe_encode(const std::vector<std::string>& tokens, const MergeTable& table,
                                    const ReservedCheck& reserved) {
  return BpeEncoder(table, reserved).encode(tokens);
}

std::vector<std::string> bpe_decode(const std::vector<std::string>& pieces) {
  std::vector<std::string> out;
  std::string pending;
  for (const auto& p : pieces) {
    if (ends_with(p, kContinue)) {
      pending += p.substr(0, p.size() - kContinue.size());
    } else {
      pending += p;
      out.push_back(std::move(pending));
      pending.clear();
    }
  }
  if (!pending.empty())
    throw Error("dangling continuation marker at end of subword sequence");
  return out;
}

std::vector<std::string> bpe_glue(const std::vector<std::string>& pieces) {
  std::vector<std::string> out;
  std::string pending;
  for (const auto& p : pieces) {
    if (ends_with(p, kContinue)) {
      pending += p.substr(0, p.size() - kContinue.size());
    } else {
      pending += p;
      out.push_back(std::move(pending));
      pending.clear();
    }
  }
  if (!pending.empty()) out.push_back(std::move(pending));
  return out;
}

void save_merges(const MergeTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write merge table " + path);
  out << "#version: paramt 1\n";
  for (const auto& m : table.merges) out << m.left << ' ' << m.right << '\n';
  if (!out) throw Error("failed writing merge table " + path);
}

MergeTable load_merges(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open merge table " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#version", 0) != 0)
    throw Error("merge table " + path + " missing #version header");
  MergeTable table;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto parts = split_ws(line);
    if (parts.size() != 2)
      throw Error("merge table " + path + " line " + std::to_string(lineno) +
                  ": expected two symbols");
    table.merges.push_back({parts[0], parts[1]});
  }
  return table;
}

}  // namespace paramt::subword
