#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semeval/corpus.hpp"

namespace semeval {

enum class Smoothing { none, epsilon };
enum class ReferenceMode { single, multi_mtv };

struct BleuConfig {
  int max_order = 4;
  Smoothing smoothing = Smoothing::none;
  double epsilon = 1e-9;
  ReferenceMode reference_mode = ReferenceMode::single;

  /// Throws InvalidArgument unless 1 <= max_order <= 4 and epsilon > 0 when used.
  void validate() const;
};

/// Clipped n-gram statistics for one (hypothesis, references) pair, or summed
/// over a corpus. Index k holds order k+1.
struct BleuStats {
  std::vector<std::size_t> matches;
  std::vector<std::size_t> totals;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;
  std::size_t empty_hypotheses = 0;

  BleuStats& operator+=(const BleuStats& other);
};

struct BleuScore {
  double value = 0.0;
  std::vector<double> precisions;
  double brevity_penalty = 0.0;
  /// Set when the hypothesis (or, for corpora, at least one) has no tokens.
  bool empty_hypothesis = false;
};

/// Reference length closest to `hyp_length`; ties go to the shorter one.
std::size_t closest_reference_length(std::size_t hyp_length, std::span<const TokenSequence> refs);

BleuStats bleu_stats(const TokenSequence& hyp, std::span<const TokenSequence> refs, int max_order);

/// BLEU from accumulated statistics at orders 1..order.
BleuScore bleu_from_stats(const BleuStats& stats, int order, const BleuConfig& cfg);

BleuScore sentence_bleu(const TokenSequence& hyp, std::span<const TokenSequence> refs, int order,
                        const BleuConfig& cfg = {});

struct BleuPair {
  TokenSequence hyp;
  std::vector<TokenSequence> refs;
};

/// Matches and totals are summed over the corpus before precisions are taken.
BleuScore corpus_bleu(std::span<const BleuPair> pairs, int order, const BleuConfig& cfg = {});

/// Unweighted mean of sentence BLEU over the pairs.
double mean_sentence_bleu(std::span<const BleuPair> pairs, int order, const BleuConfig& cfg = {});

/// Settings used for Self-BLEU when none are given: order 4, epsilon 1e-9.
BleuConfig default_self_bleu_config();

/// Mean over i of BLEU(hyps[i], all other hyps) at cfg.max_order.
double self_bleu(std::span<const TokenSequence> hyps, const BleuConfig& cfg = default_self_bleu_config());

enum class DistDenominator { tokens, ngrams };

/// Distinct n-grams across the corpus divided by total tokens (or total n-grams).
double dist_n(std::span<const TokenSequence> hyps, std::size_t n,
              DistDenominator denominator = DistDenominator::tokens);

struct HeadEntropy {
  double bits = 0.0;
  std::size_t used = 0;
  /// Hypotheses with fewer than two tokens.
  std::size_t skipped = 0;
};

/// Shannon entropy (log2) of the opening-bigram distribution.
HeadEntropy head_entropy(std::span<const TokenSequence> hyps);

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::set<std::string> words);

  /// Built-in English list (the classic 179-word NLTK set).
  static StopwordList english();
  static StopwordList load(const std::filesystem::path& path);
  static StopwordList parse(std::string_view text);

  bool contains(std::string_view lowercase_word) const;
  bool empty() const noexcept { return words_.empty(); }
  std::size_t size() const noexcept { return words_.size(); }
  const std::set<std::string, std::less<>>& words() const noexcept { return words_; }

 private:
  std::set<std::string, std::less<>> words_;
};

enum class Aggregation { micro, macro };

struct RecallCounts {
  std::size_t matched = 0;
  std::size_t content_words = 0;
};

/// Reference content words (lowercased non-stopwords, counted per occurrence)
/// whose lowercase form appears among the hypothesis tokens.
RecallCounts content_recall_counts(const TokenSequence& hyp, const TokenSequence& ref,
                                   const StopwordList& stop);

/// Sentence-level recall; 0 when the reference has no content words.
double content_recall(const TokenSequence& hyp, const TokenSequence& ref, const StopwordList& stop);

struct RecallPair {
  TokenSequence hyp;
  TokenSequence ref;
};

/// Corpus recall. Micro pools counts; macro averages sentences that have content words.
double content_recall(std::span<const RecallPair> pairs, const StopwordList& stop,
                      Aggregation aggregation = Aggregation::micro);

/// Removes the longest listed prefix the sequence starts with, once.
TokenSequence strip_prefixes(const TokenSequence& seq, std::span<const TokenSequence> prefixes);

/// One phrase per line, `#` comments, tokenized with `tokenize`.
std::vector<TokenSequence> load_prefixes(const std::filesystem::path& path);
std::vector<TokenSequence> parse_prefixes(std::string_view text);
std::vector<TokenSequence> default_prefixes();

}  // namespace semeval
