// Command-line front end. Verbs are thin wrappers over the library; `run`
// drives the whole pipeline from a config file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "paramt/bpe.hpp"
#include "paramt/corpus.hpp"
#include "paramt/error.hpp"
#include "paramt/experiment.hpp"
#include "paramt/metrics.hpp"
#include "paramt/seq2seq.hpp"
#include "paramt/synth.hpp"
#include "paramt/text.hpp"
#include "paramt/vocab.hpp"

namespace fs = std::filesystem;
using namespace paramt;

namespace {

std::pair<ParaphraseId, std::string> parse_corpus_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
    throw Error("expected <id>=<file>, got '" + arg + "'");
  return {ParaphraseId::parse(arg.substr(0, eq)), arg.substr(eq + 1)};
}

std::vector<corpus::ParaphraseCorpus> load_all(const std::vector<std::string>& corpus_args) {
  std::vector<corpus::ParaphraseCorpus> out;
  out.reserve(corpus_args.size());
  for (const auto& arg : corpus_args) {
    const auto [id, file] = parse_corpus_arg(arg);
    out.push_back(corpus::load_corpus(file, id));
  }
  return out;
}

std::vector<std::vector<std::string>> read_token_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(split_ws(line));
  return lines;
}

void write_token_lines(const std::vector<std::vector<std::string>>& lines,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const auto& l : lines) out << join(l) << '\n';
  if (!out) throw Error("failed writing " + path);
}

std::vector<seq2seq::IdPair> to_id_pairs(const std::vector<std::vector<std::string>>& src,
                                         const std::vector<std::vector<std::string>>& tgt,
                                         const subword::Vocabulary& vocab) {
  if (src.size() != tgt.size()) throw Error("source and target line counts differ");
  std::vector<seq2seq::IdPair> out;
  out.reserve(src.size());
  for (size_t i = 0; i < src.size(); ++i)
    out.push_back({vocab.to_ids(src[i]), vocab.to_ids(tgt[i])});
  return out;
}

void add_model_flags(CLI::App* cmd, seq2seq::ModelConfig& m) {
  cmd->add_option("--embed_dim", m.embed_dim, "embedding width");
  cmd->add_option("--hidden_dim", m.hidden_dim, "LSTM width");
  cmd->add_option("--num_layers", m.num_layers, "stacked LSTM layers");
  cmd->add_option("--dropout", m.dropout_rate, "dropout rate on layer inputs");
  cmd->add_option("--batch_size", m.batch_size, "examples per SGD step");
  cmd->add_option("--epochs", m.max_epochs, "training epochs");
  cmd->add_option("--lr", m.initial_lr, "initial learning rate");
  cmd->add_option("--decay", m.decay_factor, "learning-rate decay factor");
  cmd->add_option("--decay_start", m.decay_start_epoch, "first unconditional decay epoch");
  cmd->add_option("--clip", m.clip_norm, "global gradient-norm ceiling");
  cmd->add_option("--max_decode_len", m.max_decode_len, "decode length cap");
  cmd->add_option("--seed", m.seed, "model seed");
}

int run_all(int argc, char** argv) {
  CLI::App app{"multi-paraphrase translation toolkit"};
  app.require_subcommand(1);

  // align
  auto* align = app.add_subcommand("align", "restrict corpora to their common key set");
  std::vector<std::string> align_corpora;
  std::string align_out = "align_out";
  align->add_option("--corpus", align_corpora, "<id>=<file>, repeatable")->required();
  align->add_option("--out_dir", align_out, "output directory");
  align->callback([&] {
    const auto result = corpus::align_corpora(load_all(align_corpora));
    fs::create_directories(align_out);
    for (const auto& c : result.aligned.corpora)
      corpus::save_corpus(c, (fs::path(align_out) / (c.id.render() + ".tsv")).string());
    corpus::write_drop_report(result.dropped, (fs::path(align_out) / "drops.tsv").string());
    corpus::write_key_list(result.aligned.keys, (fs::path(align_out) / "keys.txt").string());
    std::printf("aligned %zu keys across %zu corpora, dropped %zu verses\n",
                result.aligned.keys.size(), result.aligned.corpora.size(),
                result.dropped.size());
  });

  // split
  auto* split = app.add_subcommand("split", "partition aligned keys into train/validation/test");
  std::vector<std::string> split_corpora;
  std::string split_out = "split_out";
  uint64_t split_seed = 7;
  split->add_option("--corpus", split_corpora, "<id>=<file>, repeatable")->required();
  split->add_option("--split_seed", split_seed, "shuffle seed");
  split->add_option("--out_dir", split_out, "output directory");
  split->callback([&] {
    const auto result = corpus::align_corpora(load_all(split_corpora));
    const auto ds = corpus::split_corpus(result.aligned, split_seed);
    fs::create_directories(split_out);
    corpus::write_key_list(ds.train, (fs::path(split_out) / "train.keys").string());
    corpus::write_key_list(ds.validation, (fs::path(split_out) / "validation.keys").string());
    corpus::write_key_list(ds.test, (fs::path(split_out) / "test.keys").string());
    std::printf("split %zu keys: %zu train, %zu validation, %zu test (seed %llu)\n",
                result.aligned.keys.size(), ds.train.size(), ds.validation.size(),
                ds.test.size(), static_cast<unsigned long long>(split_seed));
  });

  // paths
  auto* paths = app.add_subcommand("paths", "enumerate translation paths for a member set");
  std::vector<std::string> path_members;
  std::string path_policy = "all_pairs";
  paths->add_option("--members", path_members, "paraphrase ids")->required();
  paths->add_option("--policy", path_policy, "all_pairs | cross_lingual_only")
      ->check(CLI::IsMember({"all_pairs", "cross_lingual_only"}));
  paths->callback([&] {
    std::vector<ParaphraseId> ids;
    for (const auto& m : path_members) ids.push_back(ParaphraseId::parse(m));
    const auto policy = path_policy == "all_pairs" ? pathgen::PathPolicy::all_pairs
                                                   : pathgen::PathPolicy::cross_lingual_only;
    const auto result = pathgen::enumerate_paths(ids, policy);
    for (const auto& p : result) std::printf("%s\n", p.render().c_str());
    std::printf("total: %zu\n", result.size());
  });

  // bpe-learn
  auto* learn = app.add_subcommand("bpe-learn", "learn a merge table from tokenized text");
  std::vector<std::string> learn_inputs;
  size_t learn_merges = 4000;
  std::string learn_out = "merges.txt";
  learn->add_option("--input", learn_inputs, "tokenized text files")->required();
  learn->add_option("--merges", learn_merges, "merge operations to learn");
  learn->add_option("--out", learn_out, "merge table file");
  learn->callback([&] {
    std::vector<std::vector<std::string>> lines;
    for (const auto& f : learn_inputs) {
      auto part = read_token_lines(f);
      lines.insert(lines.end(), part.begin(), part.end());
    }
    const auto table = subword::learn_bpe(lines, learn_merges);
    subword::save_merges(table, learn_out);
    std::printf("learned %zu merges -> %s\n", table.merges.size(), learn_out.c_str());
  });

  // bpe-apply
  auto* apply = app.add_subcommand("bpe-apply", "segment tokenized text with a merge table");
  std::string apply_merges, apply_in, apply_out;
  apply->add_option("--merges", apply_merges, "merge table file")->required();
  apply->add_option("--input", apply_in, "tokenized text file")->required();
  apply->add_option("--output", apply_out, "segmented output file")->required();
  apply->callback([&] {
    const auto table = subword::load_merges(apply_merges);
    const subword::BpeEncoder enc(table);
    auto lines = read_token_lines(apply_in);
    for (auto& l : lines) l = enc.encode(l);
    write_token_lines(lines, apply_out);
    std::printf("segmented %zu lines -> %s\n", lines.size(), apply_out.c_str());
  });

  // train
  auto* train = app.add_subcommand("train", "train on segmented parallel text");
  std::string tr_src, tr_tgt, tr_vsrc, tr_vtgt, tr_vocab;
  std::string tr_checkpoint = "checkpoint.txt", tr_history = "history.csv";
  seq2seq::ModelConfig tr_model;
  train->add_option("--src", tr_src, "training source, segmented")->required();
  train->add_option("--tgt", tr_tgt, "training target, segmented")->required();
  train->add_option("--val_src", tr_vsrc, "validation source, segmented")->required();
  train->add_option("--val_tgt", tr_vtgt, "validation target, segmented")->required();
  train->add_option("--vocab", tr_vocab, "vocabulary file")->required();
  train->add_option("--checkpoint", tr_checkpoint, "best-validation checkpoint file");
  train->add_option("--history", tr_history, "per-epoch loss CSV");
  add_model_flags(train, tr_model);
  train->callback([&] {
    const auto vocab = subword::load_vocab(tr_vocab);
    const auto train_pairs =
        to_id_pairs(read_token_lines(tr_src), read_token_lines(tr_tgt), vocab);
    const auto val_pairs =
        to_id_pairs(read_token_lines(tr_vsrc), read_token_lines(tr_vtgt), vocab);
    const auto init = seq2seq::init_params(tr_model, vocab.size());
    const auto result = seq2seq::train(init, train_pairs, val_pairs);
    seq2seq::save_checkpoint(result.best_params, vocab.hash(), tr_checkpoint);
    std::ofstream hist(tr_history);
    if (!hist) throw Error("cannot write " + tr_history);
    hist << "epoch,train_loss,val_loss,lr\n";
    for (const auto& e : result.history)
      hist << e.epoch << ',' << fmt_real(e.train_loss) << ',' << fmt_real(e.val_loss) << ','
           << fmt_real(e.lr) << '\n';
    for (const auto& e : result.history)
      std::printf("epoch %zu  train %.4f  val %.4f  lr %.4g\n", e.epoch, e.train_loss,
                  e.val_loss, e.lr);
    std::printf("best epoch %zu (val %.4f) -> %s\n", result.best_epoch, result.best_val,
                tr_checkpoint.c_str());
  });

  // decode
  auto* decode = app.add_subcommand("decode", "greedy-decode tokenized source text");
  std::string de_checkpoint, de_vocab, de_merges, de_in, de_out;
  size_t de_maxlen = 0;
  decode->add_option("--checkpoint", de_checkpoint, "checkpoint file")->required();
  decode->add_option("--vocab", de_vocab, "vocabulary file")->required();
  decode->add_option("--merges", de_merges, "segment input with this merge table first");
  decode->add_option("--input", de_in, "tokenized source file")->required();
  decode->add_option("--output", de_out, "decoded output file")->required();
  decode->add_option("--max_decode_len", de_maxlen, "decode length cap (default from checkpoint)");
  decode->callback([&] {
    const auto vocab = subword::load_vocab(de_vocab);
    const auto ck = seq2seq::load_checkpoint(de_checkpoint, vocab.hash());
    auto lines = read_token_lines(de_in);
    if (!de_merges.empty()) {
      const auto table = subword::load_merges(de_merges);
      const subword::BpeEncoder enc(table);
      for (auto& l : lines) l = enc.encode(l);
    }
    const size_t cap = de_maxlen ? de_maxlen : ck.params.config.max_decode_len;
    std::vector<std::vector<std::string>> out;
    out.reserve(lines.size());
    for (const auto& l : lines) {
      const auto dec = seq2seq::decode_greedy(ck.params, vocab.to_ids(l), cap);
      out.push_back(subword::bpe_glue(vocab.to_tokens(dec.ids)));
    }
    write_token_lines(out, de_out);
    std::printf("decoded %zu lines -> %s\n", out.size(), de_out.c_str());
  });

  // eval
  auto* eval = app.add_subcommand("eval", "score decoded text against references");
  std::string ev_hyp, ev_ref, ev_train_tgt, ev_csv, ev_label = "eval";
  size_t ev_boot = 1000;
  double ev_alpha = 0.05;
  uint64_t ev_seed = 13;
  eval->add_option("--hyp", ev_hyp, "hypothesis file, one sentence per line")->required();
  eval->add_option("--ref", ev_ref, "reference file")->required();
  eval->add_option("--train_tgt", ev_train_tgt, "training target text for frequency buckets");
  eval->add_option("--bootstrap", ev_boot, "bootstrap replicates");
  eval->add_option("--alpha", ev_alpha, "CI significance level");
  eval->add_option("--bootstrap_seed", ev_seed, "bootstrap seed");
  eval->add_option("--label", ev_label, "config column value");
  eval->add_option("--csv", ev_csv, "also write a one-row results CSV");
  eval->callback([&] {
    const auto hyps = read_token_lines(ev_hyp);
    const auto refs = read_token_lines(ev_ref);
    metrics::EvalReport rep;
    rep.config = ev_label;
    rep.bleu = metrics::corpus_bleu(hyps, refs);
    std::map<std::string, int64_t> freq;
    if (!ev_train_tgt.empty())
      for (const auto& line : read_token_lines(ev_train_tgt))
        for (const auto& tok : line) ++freq[tok];
    rep.fmeasure = metrics::bucket_fmeasure(hyps, refs, freq);
    if (rep.bleu.hyp_len == 0) {
      rep.entropy = rep.ci_low = rep.ci_high = 0.0;
    } else {
      rep.entropy = metrics::unigram_entropy(hyps);
      std::tie(rep.ci_low, rep.ci_high) =
          metrics::bootstrap_ci(hyps, ev_boot, ev_alpha, ev_seed);
    }
    std::printf("BLEU %.2f (bp %.3f, precisions %.3f/%.3f/%.3f/%.3f)\n", rep.bleu.bleu * 100.0,
                rep.bleu.brevity_penalty, rep.bleu.precisions[0], rep.bleu.precisions[1],
                rep.bleu.precisions[2], rep.bleu.precisions[3]);
    std::printf("entropy %.4f bits, %.0f%% CI [%.4f, %.4f]\n", rep.entropy,
                (1.0 - ev_alpha) * 100.0, rep.ci_low, rep.ci_high);
    for (size_t b = 0; b < metrics::kNumBuckets; ++b)
      std::printf("bucket %-7s f1 %.3f (p %.3f, r %.3f, matched %lld)\n",
                  metrics::kBucketLabels[b], rep.fmeasure.buckets[b].f1,
                  rep.fmeasure.buckets[b].precision, rep.fmeasure.buckets[b].recall,
                  static_cast<long long>(rep.fmeasure.buckets[b].matched));
    if (!ev_csv.empty()) {
      std::ofstream out(ev_csv);
      if (!out) throw Error("cannot write " + ev_csv);
      out << metrics::eval_csv_header() << '\n' << metrics::eval_csv_row(rep) << '\n';
    }
  });

  // run
  auto* run = app.add_subcommand("run", "run a config file end to end");
  std::string run_config;
  run->add_option("--config", run_config, "experiment config file")->required();
  run->callback([&] {
    const auto manifests = experiment::run_config_file(run_config);
    for (const auto& m : manifests)
      std::printf("%-14s bleu %6.2f  entropy %.4f  (%s)\n",
                  m.at("label").get<std::string>().c_str(),
                  m.at("eval").at("bleu").get<double>() * 100.0,
                  m.at("eval").at("entropy").get<double>(),
                  m.at("artifacts").at("manifest").get<std::string>().c_str());
  });

  // synth
  auto* synth = app.add_subcommand("synth", "generate paraphrase corpora for two languages");
  synth::SynthSpec spec;
  std::string synth_out = "synth_out";
  synth->add_option("--out_dir", synth_out, "output directory");
  synth->add_option("--vocab_size", spec.vocab_size, "surface forms per language");
  synth->add_option("--num_keys", spec.num_keys, "aligned verse keys");
  synth->add_option("--per_side", spec.paraphrases_per_side, "paraphrase corpora per language");
  synth->add_option("--rate", spec.substitution_rate, "per-occurrence substitution rate");
  synth->add_option("--seed", spec.seed, "generator seed");
  synth->add_option("--class_size", spec.class_size, "synonyms per lexical class");
  synth->add_option("--zipf_s", spec.zipf_s, "class frequency skew");
  synth->add_option("--min_len", spec.min_len, "shortest sentence");
  synth->add_option("--max_len", spec.max_len, "longest sentence");
  synth->add_option("--rare_member_rate", spec.rare_member_rate,
                    "base text's chance of a non-default member");
  synth->add_option("--member_preference", spec.member_preference,
                    "corpus bias toward its own member");
  synth->callback([&] {
    const auto files = synth::generate_synthetic(spec, synth_out);
    for (const auto& f : files) std::printf("%s\n", f.c_str());
  });

  // tables
  auto* tables = app.add_subcommand("tables", "combine run manifests into result tables");
  std::vector<std::string> tb_manifests;
  std::string tb_csv = "results.csv", tb_curve = "curve.csv";
  tables->add_option("--manifests", tb_manifests, "manifest.json files")->required();
  tables->add_option("--csv", tb_csv, "combined results CSV");
  tables->add_option("--curve", tb_curve, "long-format score-vs-data file");
  tables->callback([&] {
    std::vector<experiment::Json> ms;
    for (const auto& f : tb_manifests) ms.push_back(experiment::load_manifest(f));
    experiment::emit_tables(ms, tb_csv, tb_curve);
    std::printf("wrote %s and %s (%zu rows)\n", tb_csv.c_str(), tb_curve.c_str(), ms.size());
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_all(argc, argv);
  } catch (const Error& e) {
    std::fprintf(stderr, "paramt: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "paramt: unexpected: %s\n", e.what());
    return 1;
  }
}
