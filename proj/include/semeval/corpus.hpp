#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semeval {

/// Whitespace-free, punctuation-trimmed tokens of one sentence.
struct TokenSequence {
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }
  auto begin() const noexcept { return tokens.begin(); }
  auto end() const noexcept { return tokens.end(); }

  /// Tokens joined by single spaces.
  std::string joined() const;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

using Ngram = std::vector<std::string>;
/// Multiset of n-grams. Ordered so iteration is deterministic.
using NgramCounts = std::map<Ngram, std::size_t>;

struct AttributeLabels {
  std::optional<std::string> sentiment;
  std::optional<std::string> topic;
  std::optional<long long> length;
  std::optional<double> surprisal;

  friend bool operator==(const AttributeLabels&, const AttributeLabels&) = default;
};

struct Sample {
  std::string id;
  std::string ground_truth;
  std::vector<std::string> mtv_variants;
  AttributeLabels attributes;

  friend bool operator==(const Sample&, const Sample&) = default;
};

enum class Condition { real, noise };

std::string_view to_string(Condition c) noexcept;
Condition parse_condition(std::string_view s);

struct HypothesisSet {
  std::string system_name;
  Condition condition = Condition::real;
  /// id -> hypothesis sentence, file order preserved in `order`.
  std::map<std::string, std::string> hypotheses;
  std::vector<std::string> order;

  const std::string& at(const std::string& id) const;
  bool contains(const std::string& id) const { return hypotheses.count(id) != 0; }
  std::size_t size() const noexcept { return order.size(); }
};

/// Split on Unicode whitespace, trim Unicode punctuation (P*) from both ends
/// of every token and drop tokens left empty. Case is preserved.
TokenSequence tokenize(std::string_view sentence);

/// All contiguous windows of length n. Throws InvalidArgument for n == 0.
NgramCounts ngrams(const TokenSequence& seq, std::size_t n);

/// Corpus JSONL: {"id", "text", "mtv"?, "sentiment"?, "topic"?, "length"?, "surprisal"?}.
std::vector<Sample> load_corpus(const std::filesystem::path& path);
std::vector<Sample> parse_corpus(std::string_view jsonl, const std::string& origin = "<memory>");
void write_corpus(const std::filesystem::path& path, const std::vector<Sample>& samples);
std::string serialize_corpus(const std::vector<Sample>& samples);

/// Hypothesis JSONL: {"id", "hyp"} lines, optionally preceded by a header line
/// {"system_name": ..., "condition": "real"|"noise"}. Overrides win over the header.
HypothesisSet load_hypotheses(const std::filesystem::path& path,
                              std::optional<std::string> system_name = std::nullopt,
                              std::optional<Condition> condition = std::nullopt);
HypothesisSet parse_hypotheses(std::string_view jsonl, const std::string& origin = "<memory>");
void write_hypotheses(const std::filesystem::path& path, const HypothesisSet& hyps);

/// Throws InvalidArgument naming the first hypothesis id absent from the corpus.
void check_hypotheses_against(const HypothesisSet& hyps, const std::vector<Sample>& corpus);

/// ASCII and Latin-1 lowercase; other code points pass through.
std::string lowercase(std::string_view s);

}  // namespace semeval
