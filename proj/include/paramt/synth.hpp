#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace paramt::synth {

// Desk-scale paraphrase-corpus generator. Two invented languages share a
// class/member structure: every lexical class has `class_size` synonymous
// members, a sentence is a class sequence with one member chosen per
// occurrence, and the two languages render the same occurrence stream with
// disjoint surface inventories (so alignment is monotone by construction).
//
// Paraphrase index j rewrites each occurrence's member with probability
// substitution_rate, and both languages render the rewritten stream: f_j and
// e_j stay word-for-word translations of each other while different indices
// disagree wherever a member was rewritten. Index 0 substitutes uniformly;
// index j > 0 leans on member (j mod class_size) with weight
// member_preference, giving each extra corpus complementary coverage of the
// rarer members. That coverage is what makes multi-paraphrase training
// measurably help on the fixed evaluation path.
struct SynthSpec {
  size_t vocab_size = 400;  // surface forms per language; class count = vocab_size / class_size
  size_t num_keys = 800;
  size_t paraphrases_per_side = 4;
  double substitution_rate = 0.3;
  uint64_t seed = 1;

  size_t class_size = 4;
  double zipf_s = 1.0;           // class frequency skew
  size_t min_len = 4;
  size_t max_len = 9;
  double rare_member_rate = 0.3;   // base text's chance of a non-default member
  double member_preference = 0.85; // corpus j > 0 bias toward its own member

  void validate() const;
};

// Writes f0..f{P-1}.tsv and e0..e{P-1}.tsv under out_dir; returns the file
// paths in that order.
std::vector<std::string> generate_synthetic(const SynthSpec& spec, const std::string& out_dir);

}  // namespace paramt::synth
