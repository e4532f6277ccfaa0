#include "paramt/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <filesystem>
#include <fstream>
#include <set>

#include "paramt/bpe.hpp"
#include "paramt/corpus.hpp"
#include "paramt/error.hpp"
#include "paramt/metrics.hpp"
#include "paramt/rng.hpp"
#include "paramt/seq2seq.hpp"
#include "paramt/text.hpp"
#include "paramt/vocab.hpp"

namespace paramt::experiment {
namespace fs = std::filesystem;
namespace {

template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw Error(std::string("[") + name + "] " + e.what());
  }
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".partial";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + tmp);
  }
  fs::rename(tmp, path);
}

std::string hex64(uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

// Tags and sentence delimiters never reach metric inputs; <unk> stays and is
// penalized naturally.
std::vector<std::string> metric_tokens(std::vector<std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (auto& t : tokens) {
    if (pathgen::is_tag_token(t) || t == "<pad>" || t == "<s>" || t == "</s>") continue;
    out.push_back(std::move(t));
  }
  return out;
}

// Sorted per-language pools with the evaluation endpoint rotated to the
// front, so grid expansion always includes the evaluated path.
std::pair<std::vector<ParaphraseId>, std::vector<ParaphraseId>> side_pools(
    const RunOptions& opt) {
  std::vector<ParaphraseId> src_pool, tgt_pool;
  for (const auto& [id, _] : opt.corpus_files) {
    if (id.lang == opt.eval_src.lang) src_pool.push_back(id);
    if (id.lang == opt.eval_tgt.lang) tgt_pool.push_back(id);
  }
  std::sort(src_pool.begin(), src_pool.end());
  std::sort(tgt_pool.begin(), tgt_pool.end());
  auto prioritize = [](std::vector<ParaphraseId>& pool, const ParaphraseId& id) {
    const auto it = std::find(pool.begin(), pool.end(), id);
    if (it != pool.end()) std::rotate(pool.begin(), it, it + 1);
  };
  prioritize(src_pool, opt.eval_src);
  prioritize(tgt_pool, opt.eval_tgt);
  return {src_pool, tgt_pool};
}

int kind_rank(pathgen::ConfigKind k) { return static_cast<int>(k); }

}  // namespace

std::vector<ParaphraseId> expand_members(pathgen::ConfigKind kind, int data,
                                         const std::vector<ParaphraseId>& source_pool,
                                         const std::vector<ParaphraseId>& target_pool) {
  using pathgen::ConfigKind;
  auto take = [&](const std::vector<ParaphraseId>& pool, size_t n, const char* side) {
    if (pool.size() < n)
      throw Error("grid point needs " + std::to_string(n) + " " + side + "-side corpora, " +
                  std::to_string(pool.size()) + " configured");
    return std::vector<ParaphraseId>(pool.begin(), pool.begin() + static_cast<long>(n));
  };
  if (data < 1) throw Error("grid data value must be >= 1");
  if (data == 1 || kind == ConfigKind::Single) {
    if (data != 1) throw Error("Single runs only exist at data = 1");
    auto m = take(source_pool, 1, "source");
    auto t = take(target_pool, 1, "target");
    m.push_back(t[0]);
    return m;
  }
  if (kind == ConfigKind::Vsrc) {
    auto m = take(source_pool, static_cast<size_t>(data - 1), "source");
    m.push_back(take(target_pool, 1, "target")[0]);
    return m;
  }
  if (kind == ConfigKind::Vtgt) {
    auto m = take(source_pool, 1, "source");
    auto t = take(target_pool, static_cast<size_t>(data - 1), "target");
    m.insert(m.end(), t.begin(), t.end());
    return m;
  }
  if (kind == ConfigKind::Vmix) {
    auto m = take(source_pool, static_cast<size_t>((data + 1) / 2), "source");
    auto t = take(target_pool, static_cast<size_t>(data / 2), "target");
    m.insert(m.end(), t.begin(), t.end());
    return m;
  }
  throw Error("grid expansion for " + pathgen::kind_name(kind) + " needs explicit members");
}

void RunOptions::finalize() {
  if (corpus_files.empty()) throw Error("no corpora configured");
  std::sort(corpus_files.begin(), corpus_files.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (size_t i = 0; i + 1 < corpus_files.size(); ++i)
    if (corpus_files[i].first == corpus_files[i + 1].first)
      throw Error("corpus id '" + corpus_files[i].first.render() + "' configured twice");

  const auto [src_pool, tgt_pool] = side_pools(*this);
  if (members.empty()) {
    if (kind == pathgen::ConfigKind::Single) {
      members = {eval_src, eval_tgt};
    } else if (data > 0) {
      members = expand_members(kind, data, src_pool, tgt_pool);
    } else {
      switch (kind) {
        case pathgen::ConfigKind::Vsrc:
          members = src_pool;
          members.push_back(eval_tgt);
          break;
        case pathgen::ConfigKind::Vtgt:
          members = tgt_pool;
          members.push_back(eval_src);
          break;
        default:
          members = src_pool;
          members.insert(members.end(), tgt_pool.begin(), tgt_pool.end());
          break;
      }
    }
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (data == 0)
    data = kind == pathgen::ConfigKind::Single ? 1 : static_cast<int>(members.size());
  if (label.empty()) label = pathgen::kind_name(kind) + "@" + std::to_string(data);

  std::set<std::string> have;
  for (const auto& [id, _] : corpus_files) have.insert(id.render());
  for (const auto& m : members)
    if (!have.count(m.render()))
      throw Error("member '" + m.render() + "' has no configured corpus file");

  pathgen::ExperimentConfig pc;
  pc.kind = kind;
  pc.members = members;
  pc.eval_path = {eval_src, eval_tgt};
  pc.path_policy = policy;
  pc.validate();
  model.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0,1)");
  if (bootstrap_reps < 100) throw Error("bootstrap replicate count must be >= 100");
}

RunOptions parse_run_options(const KeyValueFile& kv) {
  RunOptions o;
  for (const auto& key : kv.section_keys("corpora"))
    o.corpus_files.emplace_back(ParaphraseId::parse(key), kv.get("corpora." + key));

  o.eval_src = ParaphraseId::parse(kv.get_or("data.eval_src", "f0"));
  o.eval_tgt = ParaphraseId::parse(kv.get_or("data.eval_tgt", "e0"));
  const std::string policy = kv.get_or("data.policy", "all_pairs");
  if (policy == "all_pairs")
    o.policy = pathgen::PathPolicy::all_pairs;
  else if (policy == "cross_lingual_only")
    o.policy = pathgen::PathPolicy::cross_lingual_only;
  else
    throw Error("unknown path policy '" + policy + "'");
  o.split_seed = kv.get_u64_or("data.split_seed", 7);
  o.budget_seed = kv.get_u64_or("data.budget_seed", 11);
  if (kv.has("data.budget") && kv.get("data.budget") != "auto")
    o.budget = static_cast<size_t>(kv.get_int("data.budget"));

  o.bpe_merges = static_cast<size_t>(kv.get_int_or("bpe.merges", 4000));
  o.vocab_cap = static_cast<size_t>(kv.get_int_or("bpe.vocab_cap", 8000));

  seq2seq::ModelConfig m;
  m.embed_dim = static_cast<size_t>(kv.get_int_or("model.embed_dim", static_cast<int64_t>(m.embed_dim)));
  m.hidden_dim = static_cast<size_t>(kv.get_int_or("model.hidden_dim", static_cast<int64_t>(m.hidden_dim)));
  m.num_layers = static_cast<size_t>(kv.get_int_or("model.num_layers", static_cast<int64_t>(m.num_layers)));
  m.dropout_rate = kv.get_real_or("model.dropout", m.dropout_rate);
  m.batch_size = static_cast<size_t>(kv.get_int_or("model.batch_size", static_cast<int64_t>(m.batch_size)));
  m.max_epochs = static_cast<size_t>(kv.get_int_or("model.epochs", static_cast<int64_t>(m.max_epochs)));
  m.initial_lr = kv.get_real_or("model.lr", m.initial_lr);
  m.decay_factor = kv.get_real_or("model.decay", m.decay_factor);
  m.decay_start_epoch = static_cast<size_t>(kv.get_int_or("model.decay_start", static_cast<int64_t>(m.decay_start_epoch)));
  m.clip_norm = kv.get_real_or("model.clip", m.clip_norm);
  m.max_decode_len = static_cast<size_t>(kv.get_int_or("model.max_decode_len", static_cast<int64_t>(m.max_decode_len)));
  m.seed = kv.get_u64_or("model.seed", m.seed);
  o.model = m;

  o.bootstrap_reps = static_cast<size_t>(kv.get_int_or("eval.bootstrap", 1000));
  o.alpha = kv.get_real_or("eval.alpha", 0.05);
  o.bootstrap_seed = kv.get_u64_or("eval.bootstrap_seed", 13);

  o.kind = pathgen::kind_from_name(kv.get_or("run.kind", "Single"));
  if (kv.has("run.members"))
    for (const auto& tok : split_ws(kv.get("run.members")))
      o.members.push_back(ParaphraseId::parse(tok));
  o.data = static_cast<int>(kv.get_int_or("run.data", 0));
  o.label = kv.get_or("run.label", "");
  o.out_dir = kv.get_or("run.out_dir", "run_out");
  return o;
}

Json run_experiment(const RunOptions& options_in) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOptions opt = options_in;
  stage("config", [&] {
    opt.finalize();
    return 0;
  });
  fs::create_directories(opt.out_dir);
  auto art = [&](const char* name) { return (fs::path(opt.out_dir) / name).string(); };

  const auto loaded = stage("load", [&] {
    std::vector<corpus::ParaphraseCorpus> v;
    v.reserve(opt.corpus_files.size());
    for (const auto& [id, file] : opt.corpus_files) v.push_back(corpus::load_corpus(file, id));
    return v;
  });

  const auto aligned = stage("align", [&] { return corpus::align_corpora(loaded); });
  const auto split = stage("split", [&] { return corpus::split_corpus(aligned.aligned, opt.split_seed); });

  pathgen::ExperimentConfig pc;
  pc.kind = opt.kind;
  pc.members = opt.members;
  pc.eval_path = {opt.eval_src, opt.eval_tgt};
  pc.budget = opt.budget;
  pc.path_policy = opt.policy;
  pc.seed = opt.budget_seed;
  const auto paths = pathgen::enumerate_paths(pc.members, pc.path_policy);

  auto train_full = stage("assemble", [&] { return pathgen::assemble_dataset(aligned.aligned, split.train, pc); });
  const auto val_text = stage("assemble", [&] { return pathgen::assemble_path(aligned.aligned, split.validation, pc.eval_path); });
  const auto test_text = stage("assemble", [&] { return pathgen::assemble_path(aligned.aligned, split.test, pc.eval_path); });

  const size_t capacity = train_full.size();
  const auto train_set = stage("equalize", [&] {
    return opt.budget ? pathgen::equalize_budget(train_full, *opt.budget, opt.budget_seed)
                      : std::move(train_full);
  });

  subword::MergeTable merges;
  subword::Vocabulary vocab;
  std::vector<seq2seq::IdPair> train_ids, val_ids, test_ids;
  stage("subword", [&] {
    std::vector<std::vector<std::string>> lines;
    lines.reserve(train_set.size() * 2);
    for (const auto& p : train_set) {
      lines.push_back(p.source_tokens);
      lines.push_back(p.target_tokens);
    }
    merges = subword::learn_bpe(lines, opt.bpe_merges);
    subword::BpeEncoder enc(merges);
    std::vector<std::vector<std::string>> encoded;
    encoded.reserve(lines.size());
    for (const auto& l : lines) encoded.push_back(enc.encode(l));
    vocab = subword::build_vocab(encoded, opt.vocab_cap);
    auto to_ids = [&](const pathgen::TaggedPair& p) {
      return seq2seq::IdPair{vocab.to_ids(enc.encode(p.source_tokens)),
                             vocab.to_ids(enc.encode(p.target_tokens))};
    };
    for (const auto& p : train_set) train_ids.push_back(to_ids(p));
    for (const auto& p : val_text) val_ids.push_back(to_ids(p));
    for (const auto& p : test_text) test_ids.push_back(to_ids(p));
    return 0;
  });

  const auto trained = stage("train", [&] {
    auto init = seq2seq::init_params(opt.model, vocab.size());
    // At desk scale the +-0.1 draw leaves every gate output near zero and
    // SGD stalls in the resulting flat region; widening the start restores
    // usable gradient magnitudes.
    for (auto& v : seq2seq::param_views(init)) *v.mat *= 8.0;
    return seq2seq::train(init, train_ids, val_ids);
  });

  std::vector<std::vector<std::string>> hyps, refs;
  stage("decode", [&] {
    hyps.reserve(test_ids.size());
    refs.reserve(test_ids.size());
    for (size_t i = 0; i < test_ids.size(); ++i) {
      const auto dec = seq2seq::decode_greedy(trained.best_params, test_ids[i].src,
                                              opt.model.max_decode_len);
      hyps.push_back(metric_tokens(subword::bpe_glue(vocab.to_tokens(dec.ids))));
      refs.push_back(test_text[i].target_tokens);
    }
    return 0;
  });

  metrics::EvalReport report;
  stage("metrics", [&] {
    report.config = opt.label;
    report.paths = paths.size();
    report.unique_sentences = train_set.size();
    report.bleu = metrics::corpus_bleu(hyps, refs);
    std::map<std::string, int64_t> train_freq;
    for (const auto& p : train_set)
      for (const auto& t : p.target_tokens) ++train_freq[t];
    report.fmeasure = metrics::bucket_fmeasure(hyps, refs, train_freq);
    size_t hyp_tokens = 0;
    for (const auto& h : hyps) hyp_tokens += h.size();
    if (hyp_tokens == 0) {
      // nothing decoded anywhere: zero diversity, degenerate interval
      report.entropy = 0.0;
      report.ci_low = report.ci_high = 0.0;
    } else {
      report.entropy = metrics::unigram_entropy(hyps);
      std::tie(report.ci_low, report.ci_high) =
          metrics::bootstrap_ci(hyps, opt.bootstrap_reps, opt.alpha, opt.bootstrap_seed);
    }
    return 0;
  });

  Json manifest;
  stage("artifacts", [&] {
    corpus::write_drop_report(aligned.dropped, art("drops.tsv"));
    corpus::write_key_list(split.train, art("train.keys"));
    corpus::write_key_list(split.validation, art("validation.keys"));
    corpus::write_key_list(split.test, art("test.keys"));
    pathgen::write_parallel_files(train_set, art("dataset.src"), art("dataset.tgt"));
    subword::save_merges(merges, art("merges.txt"));
    subword::save_vocab(vocab, art("vocab.tsv"));
    {
      const std::string tmp = art("checkpoint.txt") + std::string(".partial");
      seq2seq::save_checkpoint(trained.best_params, vocab.hash(), tmp);
      fs::rename(tmp, art("checkpoint.txt"));
    }
    std::string dec_text, ref_text;
    for (size_t i = 0; i < hyps.size(); ++i) {
      dec_text += join(hyps[i]) + "\n";
      ref_text += join(refs[i]) + "\n";
    }
    write_text_atomic(art("decoded.txt"), dec_text);
    write_text_atomic(art("references.txt"), ref_text);

    std::string hist = "epoch,train_loss,val_loss,lr\n";
    for (const auto& e : trained.history)
      hist += std::to_string(e.epoch) + "," + fmt_real(e.train_loss) + "," +
              fmt_real(e.val_loss) + "," + fmt_real(e.lr) + "\n";
    write_text_atomic(art("history.csv"), hist);
    write_text_atomic(art("eval.csv"),
                      metrics::eval_csv_header() + "\n" + metrics::eval_csv_row(report) + "\n");
    return 0;
  });

  manifest["label"] = opt.label;
  manifest["kind"] = pathgen::kind_name(opt.kind);
  manifest["data"] = opt.data;
  manifest["eval_path"] = pc.eval_path.render();
  manifest["policy"] =
      opt.policy == pathgen::PathPolicy::all_pairs ? "all_pairs" : "cross_lingual_only";
  Json members_j = Json::array();
  for (const auto& m : opt.members) members_j.push_back(m.render());
  manifest["members"] = members_j;

  Json options_j;
  options_j["split_seed"] = opt.split_seed;
  options_j["budget_seed"] = opt.budget_seed;
  options_j["bootstrap_seed"] = opt.bootstrap_seed;
  options_j["budget"] = opt.budget ? Json(*opt.budget) : Json(nullptr);
  options_j["bpe_merges"] = opt.bpe_merges;
  options_j["vocab_cap"] = opt.vocab_cap;
  options_j["bootstrap_reps"] = opt.bootstrap_reps;
  options_j["alpha"] = opt.alpha;
  options_j["model"] = {{"embed_dim", opt.model.embed_dim},
                        {"hidden_dim", opt.model.hidden_dim},
                        {"num_layers", opt.model.num_layers},
                        {"dropout_rate", opt.model.dropout_rate},
                        {"batch_size", opt.model.batch_size},
                        {"max_epochs", opt.model.max_epochs},
                        {"initial_lr", opt.model.initial_lr},
                        {"decay_factor", opt.model.decay_factor},
                        {"decay_start_epoch", opt.model.decay_start_epoch},
                        {"clip_norm", opt.model.clip_norm},
                        {"max_decode_len", opt.model.max_decode_len},
                        {"seed", opt.model.seed}};
  manifest["options"] = options_j;
  const std::string options_dump = options_j.dump();
  manifest["config_hash"] = hex64(fnv1a(options_dump.data(), options_dump.size()));

  Json corpora_j = Json::array();
  for (const auto& [id, file] : opt.corpus_files) {
    size_t dropped = 0;
    for (const auto& d : aligned.dropped)
      if (d.paraphrase == id.render()) ++dropped;
    corpora_j.push_back({{"id", id.render()},
                         {"file", file},
                         {"aligned_verses", aligned.aligned.keys.size()},
                         {"dropped", dropped}});
  }
  manifest["corpora"] = corpora_j;
  manifest["split"] = {{"train", split.train.size()},
                       {"validation", split.validation.size()},
                       {"test", split.test.size()},
                       {"seed", opt.split_seed}};
  manifest["paths"] = paths.size();
  manifest["capacity"] = capacity;
  manifest["unique_sentences"] = report.unique_sentences;
  manifest["bpe"] = {{"merges_requested", opt.bpe_merges},
                     {"merges_learned", merges.merges.size()},
                     {"joint", true},
                     {"vocab_cap", opt.vocab_cap},
                     {"vocab_size", vocab.size()},
                     {"vocab_hash", hex64(vocab.hash())}};
  Json epochs_j = Json::array();
  for (const auto& e : trained.history)
    epochs_j.push_back({{"epoch", e.epoch},
                        {"train_loss", e.train_loss},
                        {"val_loss", e.val_loss},
                        {"lr", e.lr}});
  manifest["epochs"] = epochs_j;
  manifest["best_epoch"] = trained.best_epoch;
  manifest["best_val"] = trained.best_val;

  Json f1_j = Json::array();
  for (const auto& b : report.fmeasure.buckets)
    f1_j.push_back({{"precision", b.precision},
                    {"recall", b.recall},
                    {"f1", b.f1},
                    {"matched", b.matched},
                    {"hyp_total", b.hyp_total},
                    {"ref_total", b.ref_total}});
  manifest["eval"] = {{"bleu", report.bleu.bleu},
                      {"bp", report.bleu.brevity_penalty},
                      {"precisions",
                       {report.bleu.precisions[0], report.bleu.precisions[1],
                        report.bleu.precisions[2], report.bleu.precisions[3]}},
                      {"hyp_len", report.bleu.hyp_len},
                      {"ref_len", report.bleu.ref_len},
                      {"entropy", report.entropy},
                      {"ci_low", report.ci_low},
                      {"ci_high", report.ci_high},
                      {"buckets", f1_j},
                      {"csv_row", metrics::eval_csv_row(report)}};
  manifest["decisions"] = {{"validation_score", "loss"},
                           {"entropy_over", "decoded_test_output"},
                           {"bootstrap", "sentence_level"},
                           {"bucket_frequencies", "training_target_side"},
                           {"alignment", "intersection_over_all_configured_corpora"}};
  manifest["artifacts"] = {{"manifest", art("manifest.json")},
                           {"checkpoint", art("checkpoint.txt")},
                           {"dataset_src", art("dataset.src")},
                           {"dataset_tgt", art("dataset.tgt")},
                           {"decoded", art("decoded.txt")},
                           {"eval_csv", art("eval.csv")},
                           {"history_csv", art("history.csv")}};
  manifest["wall_clock_sec"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  stage("artifacts", [&] {
    save_manifest(manifest, art("manifest.json"));
    return 0;
  });
  return manifest;
}

std::vector<Json> run_config_file(const std::string& config_path) {
  const auto kv = KeyValueFile::parse_file(config_path);
  RunOptions base = parse_run_options(kv);
  if (!kv.has("grid.data")) {
    return {run_experiment(base)};
  }

  std::vector<int> grid_data;
  for (const auto& tok : split_ws(kv.get("grid.data")))
    grid_data.push_back(static_cast<int>(std::stol(tok)));
  std::vector<pathgen::ConfigKind> kinds;
  for (const auto& tok : split_ws(kv.get_or("grid.kinds", pathgen::kind_name(base.kind))))
    kinds.push_back(pathgen::kind_from_name(tok));
  if (grid_data.empty() || kinds.empty()) throw Error("empty experiment grid");

  // One alignment and split shared by every grid point keeps budgets and
  // test sets comparable.
  const auto probe_split = stage("split", [&] {
    std::vector<corpus::ParaphraseCorpus> v;
    for (const auto& [id, file] : base.corpus_files) v.push_back(corpus::load_corpus(file, id));
    return corpus::split_corpus(corpus::align_corpora(v).aligned, base.split_seed);
  });
  const size_t n_train = probe_split.train.size();

  const auto [src_pool, tgt_pool] = side_pools(base);

  struct Point {
    pathgen::ConfigKind kind;
    int data;
    std::vector<ParaphraseId> members;
  };
  std::vector<Point> points;
  std::set<std::string> seen;
  size_t auto_budget = SIZE_MAX;
  for (const auto d : grid_data)
    for (const auto k : kinds) {
      const auto kind = d == 1 ? pathgen::ConfigKind::Single : k;
      const auto members = expand_members(kind, d, src_pool, tgt_pool);
      const std::string label = pathgen::kind_name(kind) + "@" + std::to_string(d);
      if (!seen.insert(label).second) continue;
      const size_t cap = pathgen::enumerate_paths(members, base.policy).size() * n_train;
      auto_budget = std::min(auto_budget, cap);
      points.push_back({kind, d, members});
    }

  const size_t budget = base.budget ? *base.budget : auto_budget;
  std::vector<Json> manifests;
  for (const auto& point : points) {
    RunOptions o = base;
    o.kind = point.kind;
    o.data = point.data;
    o.members = point.members;
    o.label.clear();
    o.budget = budget;
    o.out_dir = (fs::path(base.out_dir) /
                 (pathgen::kind_name(point.kind) + "@" + std::to_string(point.data)))
                    .string();
    manifests.push_back(run_experiment(o));
  }
  emit_tables(manifests, (fs::path(base.out_dir) / "results.csv").string(),
              (fs::path(base.out_dir) / "curve.csv").string());
  return manifests;
}

void save_manifest(const Json& manifest, const std::string& path) {
  write_text_atomic(path, manifest.dump(2) + "\n");
}

Json load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("manifest " + path + " is not valid JSON: " + e.what());
  }
  return j;
}

void emit_tables(const std::vector<Json>& manifests, const std::string& csv_path,
                 const std::string& curve_path) {
  if (manifests.empty()) throw Error("no manifests to tabulate");
  const std::string eval_path = manifests.front().at("eval_path");
  for (const auto& m : manifests)
    if (m.at("eval_path") != eval_path)
      throw Error("manifests mix evaluation paths; tables need a single one");

  std::vector<const Json*> rows;
  rows.reserve(manifests.size());
  for (const auto& m : manifests) rows.push_back(&m);
  std::sort(rows.begin(), rows.end(), [](const Json* a, const Json* b) {
    const int ka = kind_rank(pathgen::kind_from_name(a->at("kind").get<std::string>()));
    const int kb = kind_rank(pathgen::kind_from_name(b->at("kind").get<std::string>()));
    if (ka != kb) return ka < kb;
    const int da = a->at("data").get<int>(), db = b->at("data").get<int>();
    if (da != db) return da < db;
    return a->at("label").get<std::string>() < b->at("label").get<std::string>();
  });

  std::string csv = metrics::eval_csv_header() + "\n";
  for (const auto* m : rows) csv += m->at("eval").at("csv_row").get<std::string>() + "\n";
  write_text_atomic(csv_path, csv);

  // Long format, paper-style 0-100 scores, one row per run.
  std::string curve = "kind,data,seed,bleu,entropy,f1_bucket1\n";
  for (const auto* m : rows) {
    const double bleu = m->at("eval").at("bleu").get<double>();
    const double entropy = m->at("eval").at("entropy").get<double>();
    const double f1b1 = m->at("eval").at("buckets").at(1).at("f1").get<double>();
    curve += m->at("kind").get<std::string>() + "," + std::to_string(m->at("data").get<int>()) +
             "," + std::to_string(m->at("options").at("model").at("seed").get<uint64_t>()) + "," +
             fmt_real(bleu * 100.0) + "," + fmt_real(entropy) + "," + fmt_real(f1b1) + "\n";
  }
  write_text_atomic(curve_path, curve);
}

}  // namespace paramt::experiment
