#include "paramt/pathgen.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "paramt/error.hpp"
#include "paramt/rng.hpp"
#include "paramt/text.hpp"

namespace paramt::pathgen {

TagToken make_tag(const ParaphraseId& id, TagSide side) {
  TagToken t;
  t.side = side;
  t.id = id;
  t.rendered = (side == TagSide::source ? "__opt_src_" : "__opt_tgt_") + id.render();
  return t;
}

std::vector<TranslationPath> enumerate_paths(std::vector<ParaphraseId> members, PathPolicy policy) {
  std::sort(members.begin(), members.end());
  for (size_t i = 0; i + 1 < members.size(); ++i)
    if (members[i] == members[i + 1])
      throw Error("duplicate member '" + members[i].render() + "' in path enumeration");
  std::vector<TranslationPath> paths;
  for (const auto& s : members)
    for (const auto& t : members) {
      if (s == t) continue;
      if (policy == PathPolicy::cross_lingual_only && s.lang == t.lang) continue;
      paths.push_back(TranslationPath{s, t});
    }
  return paths;
}

std::string kind_name(ConfigKind k) {
  switch (k) {
    case ConfigKind::Single: return "Single";
    case ConfigKind::Vsrc: return "Vsrc";
    case ConfigKind::Vtgt: return "Vtgt";
    case ConfigKind::Vmix: return "Vmix";
    case ConfigKind::Multilingual: return "Multilingual";
  }
  throw Error("unknown config kind");
}

ConfigKind kind_from_name(const std::string& name) {
  if (name == "Single") return ConfigKind::Single;
  if (name == "Vsrc") return ConfigKind::Vsrc;
  if (name == "Vtgt") return ConfigKind::Vtgt;
  if (name == "Vmix") return ConfigKind::Vmix;
  if (name == "Multilingual") return ConfigKind::Multilingual;
  throw Error("unknown experiment kind '" + name + "' (expected Single|Vsrc|Vtgt|Vmix|Multilingual)");
}

void ExperimentConfig::validate() const {
  if (members.size() < 2) throw Error("experiment needs at least two member paraphrases");
  auto contains = [&](const ParaphraseId& id) {
    return std::find(members.begin(), members.end(), id) != members.end();
  };
  if (!contains(eval_path.src) || !contains(eval_path.tgt))
    throw Error("eval path " + eval_path.render() + " endpoints must be experiment members");
  if (eval_path.src == eval_path.tgt) throw Error("eval path endpoints must differ");
}

std::vector<TaggedPair> assemble_path(const corpus::AlignedCorpus& aligned,
                                      const std::vector<corpus::VerseKey>& split_keys,
                                      const TranslationPath& path) {
  if (!aligned.has_id(path.src) || !aligned.has_id(path.tgt))
    throw Error("path " + path.render() + " references a corpus missing from the alignment");
  std::vector<corpus::VerseKey> keys = split_keys;
  std::sort(keys.begin(), keys.end());

  const auto& src_corpus = aligned.by_id(path.src);
  const auto& tgt_corpus = aligned.by_id(path.tgt);
  const TagToken src_tag = make_tag(path.src, TagSide::source);
  const TagToken tgt_tag = make_tag(path.tgt, TagSide::target);
  std::vector<TaggedPair> out;
  out.reserve(keys.size());
  for (const auto& key : keys) {
    const auto s = src_corpus.verses.find(key);
    const auto t = tgt_corpus.verses.find(key);
    if (s == src_corpus.verses.end() || t == tgt_corpus.verses.end())
      throw Error("key '" + key + "' missing from aligned corpus member");
    TaggedPair pair;
    pair.path = path;
    pair.key = key;
    pair.source_tokens.push_back(src_tag.rendered);
    pair.source_tokens.push_back(tgt_tag.rendered);
    for (auto& tok : split_ws(s->second)) pair.source_tokens.push_back(std::move(tok));
    pair.target_tokens = split_ws(t->second);
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<TaggedPair> assemble_dataset(const corpus::AlignedCorpus& aligned,
                                         const std::vector<corpus::VerseKey>& split_keys,
                                         const ExperimentConfig& config) {
  config.validate();
  for (const auto& m : config.members)
    if (!aligned.has_id(m))
      throw Error("experiment member '" + m.render() + "' missing from aligned corpus");

  const auto paths = enumerate_paths(config.members, config.path_policy);
  std::vector<TaggedPair> out;
  out.reserve(paths.size() * split_keys.size());
  for (const auto& path : paths) {
    auto part = assemble_path(aligned, split_keys, path);
    for (auto& pair : part) out.push_back(std::move(pair));
  }
  return out;
}

std::vector<TaggedPair> equalize_budget(const std::vector<TaggedPair>& pairs, size_t budget,
                                        uint64_t seed) {
  if (budget > pairs.size())
    throw Error("budget " + std::to_string(budget) + " exceeds available pairs (" +
                std::to_string(pairs.size()) + ")");
  if (budget == pairs.size()) return pairs;

  // Group input indices by path, keeping first-seen path order.
  std::vector<std::vector<size_t>> groups;
  std::map<std::string, size_t> group_of;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const std::string p = pairs[i].path.render();
    auto it = group_of.find(p);
    if (it == group_of.end()) {
      it = group_of.emplace(p, groups.size()).first;
      groups.emplace_back();
    }
    groups[it->second].push_back(i);
  }
  Rng rng(seed);
  for (auto& g : groups) rng.shuffle(g);

  // Round-robin across paths so every path keeps at least one pair whenever
  // budget >= path count.
  std::vector<size_t> selected;
  selected.reserve(budget);
  for (size_t round = 0; selected.size() < budget; ++round) {
    bool any = false;
    for (const auto& g : groups) {
      if (round < g.size()) {
        any = true;
        selected.push_back(g[round]);
        if (selected.size() == budget) break;
      }
    }
    if (!any) break;  // unreachable given budget <= pairs.size()
  }
  std::sort(selected.begin(), selected.end());
  std::vector<TaggedPair> out;
  out.reserve(selected.size());
  for (size_t i : selected) out.push_back(pairs[i]);
  return out;
}

void write_parallel_files(const std::vector<TaggedPair>& pairs, const std::string& src_path,
                          const std::string& tgt_path) {
  std::ofstream src(src_path), tgt(tgt_path);
  if (!src || !tgt) throw Error("cannot write dataset files " + src_path + " / " + tgt_path);
  for (const auto& p : pairs) {
    src << join(p.source_tokens) << '\n';
    tgt << join(p.target_tokens) << '\n';
  }
}

ParallelLines read_parallel_files(const std::string& src_path, const std::string& tgt_path) {
  std::ifstream src(src_path), tgt(tgt_path);
  if (!src) throw Error("cannot open " + src_path);
  if (!tgt) throw Error("cannot open " + tgt_path);
  ParallelLines lines;
  std::string s;
  while (std::getline(src, s)) lines.src.push_back(split_ws(s));
  while (std::getline(tgt, s)) lines.tgt.push_back(split_ws(s));
  if (lines.src.size() != lines.tgt.size())
    throw Error("parallel files differ in length: " + src_path + " vs " + tgt_path);
  return lines;
}

}  // namespace paramt::pathgen
