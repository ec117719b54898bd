#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semeval/corpus.hpp"
#include "semeval/ngram_metrics.hpp"
#include "semeval/semantic_space.hpp"

namespace semeval {

/// fraction values render as percentages, scalar values as plain numbers.
enum class MetricUnit { fraction, scalar };

struct Metric {
  std::string name;
  double value = 0.0;
  MetricUnit unit = MetricUnit::scalar;

  friend bool operator==(const Metric&, const Metric&) = default;
};

struct ReportRow {
  std::string label;
  std::vector<Metric> cells;

  const Metric* find(std::string_view name) const;
  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct MetricReport {
  std::string kind;
  std::string system_name;
  std::string condition;
  std::vector<ReportRow> rows;
  /// Non-numeric results and methodology notes (verdicts, approximations).
  KeyValues attributes;
  /// Resolved knob settings the fingerprint is computed from.
  KeyValues config;
  std::string config_fingerprint;
  std::vector<std::string> warnings;

  ReportRow& add_row(std::string label);
  /// Value of `name` in row `row`; throws InvalidArgument when absent.
  double metric(std::string_view row, std::string_view name) const;
  /// Value of `name` in the first row.
  double metric(std::string_view name) const;
  std::optional<std::string> attribute(std::string_view key) const;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// 16 hex digits of FNV-1a over "key=value\n" lines.
std::string fingerprint(const KeyValues& config);

struct ProtocolConfig {
  std::vector<int> n_ways{2, 4, 10, 24};
  int retrieval_runs = 10;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
  BleuConfig self_bleu = default_self_bleu_config();
  /// Smoothing for the BLEU-trap and prefix-strip tables.
  BleuConfig bleu{};
  DistDenominator dist_denominator = DistDenominator::tokens;
  Aggregation recall_aggregation = Aggregation::micro;
  StopwordList stopwords = StopwordList::english();
  std::string stopword_source = "builtin:english-179";
  std::vector<TokenSequence> prefixes = default_prefixes();
  bool normalize_embeddings = false;
  std::string embedding_source = "file";
  std::string embedding_model = "unknown";

  /// Canonical key/value echo of every knob (thread count excluded: it
  /// never changes results).
  KeyValues describe() const;
};

struct EmbeddingPair {
  EmbeddingMatrix hyp;
  EmbeddingMatrix ref;
};

/// Retrieval at each N, Content Recall, Dist-1/2, Head Entropy, Self-BLEU, FD.
MetricReport run_main_eval(const std::vector<Sample>& corpus, const HypothesisSet& hyps,
                           const EmbeddingPair& embeddings, const ProtocolConfig& cfg);

/// Corpus BLEU-1/2 scored against the MTV pool (ground truth + variants) and
/// against the ground truth only; a second row carries mean sentence BLEU.
MetricReport bleu_trap_analysis(const std::vector<Sample>& corpus, const HypothesisSet& hyps,
                                const ProtocolConfig& cfg);

struct NoiseEmbeddings {
  EmbeddingMatrix ref;
  EmbeddingMatrix real_hyp;
  EmbeddingMatrix noise_hyp;
};

/// Content Recall, Dist-2 and FD for real vs. noise inputs, their deltas
/// (noise - real) and the signal-dependency verdict.
MetricReport noise_dependency_report(const std::vector<Sample>& corpus, const HypothesisSet& real_hyps,
                                     const HypothesisSet& noise_hyps, const NoiseEmbeddings& embeddings,
                                     const ProtocolConfig& cfg);

/// Corpus BLEU-1..4 (single reference) before and after removing the listed
/// prefixes from both sides, with the relative change per order.
MetricReport prefix_strip_analysis(const std::vector<Sample>& corpus, const HypothesisSet& hyps,
                                   const std::vector<TokenSequence>& prefixes, const ProtocolConfig& cfg);

struct LabelSets {
  std::vector<std::string> sentiment;
  std::vector<std::string> topic;
};

/// Chance accuracy 1/N_C per categorical task and median-predictor MAE per
/// regression task. Class sets default to the labels observed in either split.
MetricReport attribute_baselines(const std::vector<AttributeLabels>& train, const std::vector<AttributeLabels>& eval,
                                 const LabelSets& classes = {});

/// Retrieval accuracy alone (one row per N, with mean and std).
MetricReport retrieval_report(const EmbeddingMatrix& queries, const EmbeddingMatrix& candidates,
                              const ProtocolConfig& cfg);

/// Frechet distance between two embedding sets.
MetricReport fd_report(const EmbeddingMatrix& ref, const EmbeddingMatrix& hyp, const ProtocolConfig& cfg);

/// (ours - base) / base when higher is better, (base - ours) / base otherwise.
double relative_improvement(double ours, double base, bool higher_is_better);

enum class ReportFormat { json, csv, markdown };
ReportFormat parse_report_format(std::string_view s);

std::string render_report(const MetricReport& r, ReportFormat format);
MetricReport parse_report_json(std::string_view json);

/// Percent with one decimal, half away from zero: 0.0785 -> "7.9%".
std::string format_percent(double fraction);
/// Two decimals, half away from zero.
std::string format_scalar(double value);

}  // namespace semeval
