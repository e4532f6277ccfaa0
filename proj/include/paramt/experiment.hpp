#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "paramt/keyvalue.hpp"
#include "paramt/model.hpp"
#include "paramt/pathgen.hpp"

namespace paramt::experiment {

using Json = nlohmann::json;

// Fully resolved settings for one experiment grid point.
struct RunOptions {
  std::vector<std::pair<ParaphraseId, std::string>> corpus_files;
  pathgen::ConfigKind kind = pathgen::ConfigKind::Single;
  std::vector<ParaphraseId> members;  // empty: derived from kind and data
  int data = 0;                       // grid axis; 0: derived
  ParaphraseId eval_src{"f", 0};
  ParaphraseId eval_tgt{"e", 0};
  pathgen::PathPolicy policy = pathgen::PathPolicy::all_pairs;
  std::optional<size_t> budget;  // unique tagged-pair count; empty keeps all
  uint64_t split_seed = 7;
  uint64_t budget_seed = 11;
  uint64_t bootstrap_seed = 13;
  size_t bpe_merges = 4000;
  size_t vocab_cap = 8000;
  size_t bootstrap_reps = 1000;
  double alpha = 0.05;
  seq2seq::ModelConfig model;
  std::string out_dir = "run_out";
  std::string label;  // default "<kind>@<data>"

  // Derives members/data/label where omitted and validates the whole bundle.
  void finalize();
};

// Builds the member list for a grid point of `data` corpora. Vsrc takes
// data-1 source-side corpora plus the evaluation target; Vtgt mirrors it;
// Vmix splits the count across both sides, source side getting the extra
// corpus on odd counts.
std::vector<ParaphraseId> expand_members(pathgen::ConfigKind kind, int data,
                                         const std::vector<ParaphraseId>& source_pool,
                                         const std::vector<ParaphraseId>& target_pool);

// Config sections: [corpora] id = file, [data] eval/split/budget settings,
// [bpe], [model], [eval], [run] kind/label/out_dir, optional [grid].
RunOptions parse_run_options(const KeyValueFile& kv);

// The full pipeline for one grid point: load, align, split, assemble,
// equalize, subword, train, decode, metrics. Writes artifacts (manifest,
// checkpoint, dataset, decodes, eval CSV) under options.out_dir; in-progress
// files carry a .partial suffix until complete. Returns the manifest.
Json run_experiment(const RunOptions& options);

// Runs a config file; with a [grid] section, one run per grid point plus
// combined tables, sharing one alignment, split, and auto-equalized budget.
std::vector<Json> run_config_file(const std::string& config_path);

void save_manifest(const Json& manifest, const std::string& path);
Json load_manifest(const std::string& path);

// Combined results CSV (rows sorted by kind then data) and a long-format
// score-vs-data file for curve plotting. All manifests must share one
// evaluation path.
void emit_tables(const std::vector<Json>& manifests, const std::string& csv_path,
                 const std::string& curve_path);

}  // namespace paramt::experiment
