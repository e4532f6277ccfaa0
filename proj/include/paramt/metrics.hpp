#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace paramt::metrics {

using TokenLines = std::vector<std::vector<std::string>>;

struct BleuReport {
  double bleu = 0.0;  // in [0,1]; table emitters scale by 100 for display
  double precisions[4] = {0, 0, 0, 0};
  double brevity_penalty = 1.0;
  size_t hyp_len = 0;
  size_t ref_len = 0;
};

// Corpus-level BLEU with clipped modified n-gram precisions, n = 1..4, one
// reference per hypothesis. No smoothing: any zero precision zeroes the
// score. Brevity penalty exp(1 - ref/hyp) when the hypothesis side is short.
BleuReport corpus_bleu(const TokenLines& hypotheses, const TokenLines& references);

// Shannon entropy in bits of the empirical unigram distribution pooled over
// all lines. Rejects a corpus with zero tokens.
double unigram_entropy(const TokenLines& token_lines);

// Percentile bootstrap over sentence-level resampling: num_bootstrap
// replicates, each drawing lines.size() lines with replacement, entropy
// recomputed per replicate. Replicate streams derive from (seed, index) so
// the interval is reproducible. Returns (ci_low, ci_high).
std::pair<double, double> bootstrap_ci(const TokenLines& token_lines, size_t num_bootstrap,
                                       double alpha, uint64_t seed);

// Word frequency classes over training counts. Types never seen in training
// land in bucket 0.
constexpr size_t kNumBuckets = 9;
extern const char* const kBucketLabels[kNumBuckets];
size_t bucket_index(int64_t training_frequency);

struct BucketStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int64_t matched = 0;
  int64_t hyp_total = 0;
  int64_t ref_total = 0;
};

struct BucketF1Report {
  BucketStats buckets[kNumBuckets];
};

// Per-bucket precision/recall/F1 where a type's per-sentence match count is
// min(hypothesis count, reference count), summed corpus-wide. Summing
// `matched` across buckets reproduces corpus_bleu's clipped unigram matches.
BucketF1Report bucket_fmeasure(const TokenLines& hypotheses, const TokenLines& references,
                               const std::map<std::string, int64_t>& training_frequencies);

// One evaluated grid point, flattened for the results CSV.
struct EvalReport {
  std::string config;
  size_t paths = 0;
  size_t unique_sentences = 0;
  BleuReport bleu;
  double entropy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  BucketF1Report fmeasure;
};

std::string eval_csv_header();
std::string eval_csv_row(const EvalReport& report);

}  // namespace paramt::metrics
