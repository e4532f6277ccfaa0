#include "paramt/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "paramt/error.hpp"
#include "paramt/rng.hpp"
#include "paramt/text.hpp"

namespace paramt::metrics {
namespace {

// n-gram key: tokens glued with a separator byte that whitespace-split
// tokens cannot contain.
std::string ngram_key(const std::vector<std::string>& toks, size_t start, size_t n) {
  std::string key;
  for (size_t k = 0; k < n; ++k) {
    if (k) key += '\x1f';
    key += toks[start + k];
  }
  return key;
}

std::map<std::string, int64_t> ngram_counts(const std::vector<std::string>& toks, size_t n) {
  std::map<std::string, int64_t> counts;
  if (toks.size() >= n)
    for (size_t i = 0; i + n <= toks.size(); ++i) ++counts[ngram_key(toks, i, n)];
  return counts;
}

double entropy_of_counts(const std::map<std::string, int64_t>& counts, int64_t total) {
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

BleuReport corpus_bleu(const TokenLines& hypotheses, const TokenLines& references) {
  if (hypotheses.size() != references.size())
    throw Error("BLEU needs one reference per hypothesis (" + std::to_string(hypotheses.size()) +
                " vs " + std::to_string(references.size()) + ")");
  if (hypotheses.empty()) throw Error("BLEU over an empty corpus");

  BleuReport rep;
  int64_t matched[4] = {0, 0, 0, 0};
  int64_t total[4] = {0, 0, 0, 0};
  for (size_t i = 0; i < hypotheses.size(); ++i) {
    const auto& hyp = hypotheses[i];
    const auto& ref = references[i];
    rep.hyp_len += hyp.size();
    rep.ref_len += ref.size();
    for (size_t n = 1; n <= 4; ++n) {
      const auto hyp_counts = ngram_counts(hyp, n);
      const auto ref_counts = ngram_counts(ref, n);
      for (const auto& [gram, c] : hyp_counts) {
        total[n - 1] += c;
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matched[n - 1] += std::min(c, it->second);
      }
    }
  }

  double log_sum = 0.0;
  bool any_zero = false;
  for (size_t n = 0; n < 4; ++n) {
    rep.precisions[n] =
        total[n] == 0 ? 0.0 : static_cast<double>(matched[n]) / static_cast<double>(total[n]);
    if (rep.precisions[n] == 0.0)
      any_zero = true;
    else
      log_sum += 0.25 * std::log(rep.precisions[n]);
  }
  if (rep.hyp_len == 0)
    rep.brevity_penalty = 0.0;
  else if (rep.hyp_len < rep.ref_len)
    rep.brevity_penalty =
        std::exp(1.0 - static_cast<double>(rep.ref_len) / static_cast<double>(rep.hyp_len));
  else
    rep.brevity_penalty = 1.0;
  rep.bleu = any_zero ? 0.0 : rep.brevity_penalty * std::exp(log_sum);
  return rep;
}

double unigram_entropy(const TokenLines& token_lines) {
  std::map<std::string, int64_t> counts;
  int64_t total = 0;
  for (const auto& line : token_lines)
    for (const auto& tok : line) {
      ++counts[tok];
      ++total;
    }
  if (total == 0) throw Error("entropy over zero tokens");
  return entropy_of_counts(counts, total);
}

std::pair<double, double> bootstrap_ci(const TokenLines& token_lines, size_t num_bootstrap,
                                       double alpha, uint64_t seed) {
  if (token_lines.size() < 2) throw Error("bootstrap needs at least two lines");
  if (num_bootstrap < 100) throw Error("bootstrap needs at least 100 replicates");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("bootstrap alpha must lie in (0,1)");

  const size_t n = token_lines.size();
  std::vector<double> values;
  values.reserve(num_bootstrap);
  for (size_t b = 0; b < num_bootstrap; ++b) {
    Rng rng(mix_seed(seed, b));
    std::map<std::string, int64_t> counts;
    int64_t total = 0;
    for (size_t i = 0; i < n; ++i) {
      const auto& line = token_lines[rng.uniform_index(n)];
      for (const auto& tok : line) {
        ++counts[tok];
        ++total;
      }
    }
    values.push_back(total == 0 ? 0.0 : entropy_of_counts(counts, total));
  }
  std::sort(values.begin(), values.end());

  // Nearest-rank percentiles: low covers alpha/2 of the mass below, high
  // leaves alpha/2 above.
  const size_t b = values.size();
  size_t lo = static_cast<size_t>(std::floor(alpha / 2.0 * static_cast<double>(b)));
  if (lo >= b) lo = b - 1;
  size_t hi = static_cast<size_t>(std::ceil((1.0 - alpha / 2.0) * static_cast<double>(b)));
  hi = hi == 0 ? 0 : hi - 1;
  if (hi >= b) hi = b - 1;
  return {values[lo], values[hi]};
}

const char* const kBucketLabels[kNumBuckets] = {"0",    "1",     "2",       "3",     "4",
                                                "5-9", "10-99", "100-999", ">=1000"};

size_t bucket_index(int64_t training_frequency) {
  if (training_frequency <= 0) return 0;
  if (training_frequency <= 4) return static_cast<size_t>(training_frequency);
  if (training_frequency <= 9) return 5;
  if (training_frequency <= 99) return 6;
  if (training_frequency <= 999) return 7;
  return 8;
}

BucketF1Report bucket_fmeasure(const TokenLines& hypotheses, const TokenLines& references,
                               const std::map<std::string, int64_t>& training_frequencies) {
  if (hypotheses.size() != references.size())
    throw Error("F-measure needs one reference per hypothesis");
  if (hypotheses.empty()) throw Error("F-measure over an empty corpus");

  BucketF1Report rep;
  auto bucket_of = [&](const std::string& type) {
    const auto it = training_frequencies.find(type);
    return bucket_index(it == training_frequencies.end() ? 0 : it->second);
  };
  for (size_t i = 0; i < hypotheses.size(); ++i) {
    const auto hyp_counts = ngram_counts(hypotheses[i], 1);
    const auto ref_counts = ngram_counts(references[i], 1);
    for (const auto& [type, c] : hyp_counts) {
      auto& b = rep.buckets[bucket_of(type)];
      b.hyp_total += c;
      const auto it = ref_counts.find(type);
      if (it != ref_counts.end()) b.matched += std::min(c, it->second);
    }
    for (const auto& [type, c] : ref_counts) rep.buckets[bucket_of(type)].ref_total += c;
  }
  for (auto& b : rep.buckets) {
    b.precision = b.hyp_total == 0
                      ? 0.0
                      : static_cast<double>(b.matched) / static_cast<double>(b.hyp_total);
    b.recall =
        b.ref_total == 0 ? 0.0 : static_cast<double>(b.matched) / static_cast<double>(b.ref_total);
    b.f1 = (b.precision + b.recall) == 0.0
               ? 0.0
               : 2.0 * b.precision * b.recall / (b.precision + b.recall);
  }
  return rep;
}

std::string eval_csv_header() {
  std::string h = "config,paths,unique_sentences,bleu,bp,p1,p2,p3,p4,entropy,ci_low,ci_high";
  for (size_t i = 0; i < kNumBuckets; ++i) h += ",f1_bucket" + std::to_string(i);
  return h;
}

std::string eval_csv_row(const EvalReport& r) {
  std::string row = r.config;
  row += ',' + std::to_string(r.paths);
  row += ',' + std::to_string(r.unique_sentences);
  row += ',' + fmt_real(r.bleu.bleu);
  row += ',' + fmt_real(r.bleu.brevity_penalty);
  for (double p : r.bleu.precisions) row += ',' + fmt_real(p);
  row += ',' + fmt_real(r.entropy);
  row += ',' + fmt_real(r.ci_low);
  row += ',' + fmt_real(r.ci_high);
  for (const auto& b : r.fmeasure.buckets) row += ',' + fmt_real(b.f1);
  return row;
}

}  // namespace paramt::metrics
