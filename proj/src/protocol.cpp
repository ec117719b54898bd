#include "semeval/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "semeval/error.hpp"

namespace semeval {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string to_string(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Corpus samples that have a hypothesis, in corpus order.
std::vector<const Sample*> evaluated_samples(const std::vector<Sample>& corpus, const HypothesisSet& hyps,
                                             std::vector<std::string>& warnings) {
  check_hypotheses_against(hyps, corpus);
  std::vector<const Sample*> out;
  for (const auto& s : corpus)
    if (hyps.contains(s.id)) out.push_back(&s);
  if (out.empty()) throw InvalidArgument("system \"" + hyps.system_name + "\" has no hypotheses for this corpus");
  if (out.size() < corpus.size())
    warnings.push_back(std::to_string(corpus.size() - out.size()) + " corpus samples have no hypothesis from \"" +
                       hyps.system_name + "\" and were skipped");
  return out;
}

std::vector<std::string> ids_of(const std::vector<const Sample*>& samples) {
  std::vector<std::string> ids;
  ids.reserve(samples.size());
  for (const auto* s : samples) ids.push_back(s->id);
  return ids;
}

EmbeddingMatrix aligned_embeddings(const EmbeddingMatrix& e, const std::vector<std::string>& ids,
                                   const char* role, bool normalize) {
  EmbeddingMatrix out;
  try {
    out = e.select(ids);
  } catch (const InvalidArgument& ex) {
    throw InvalidArgument(std::string("missing ") + role + " embeddings: " + ex.what());
  }
  out.validate();
  return normalize ? out.normalized() : out;
}

std::vector<TokenSequence> tokenize_hyps(const std::vector<const Sample*>& samples, const HypothesisSet& hyps) {
  std::vector<TokenSequence> out;
  out.reserve(samples.size());
  for (const auto* s : samples) out.push_back(tokenize(hyps.at(s->id)));
  return out;
}

double content_recall_of(const std::vector<const Sample*>& samples, const std::vector<TokenSequence>& hyp_tokens,
                         const ProtocolConfig& cfg) {
  std::vector<RecallPair> pairs;
  pairs.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) pairs.push_back({hyp_tokens[i], tokenize(samples[i]->ground_truth)});
  return content_recall(pairs, cfg.stopwords, cfg.recall_aggregation);
}

void add(ReportRow& row, std::string name, double value, MetricUnit unit) {
  if (!std::isfinite(value)) throw NumericalError("metric \"" + name + "\" is not finite");
  row.cells.push_back({std::move(name), value, unit});
}

std::string way_name(int n) { return "acc_" + std::to_string(n) + "way"; }

void finish(MetricReport& r, const ProtocolConfig& cfg) {
  r.config = cfg.describe();
  r.config_fingerprint = fingerprint(r.config);
}

const char* unit_name(MetricUnit u) { return u == MetricUnit::fraction ? "fraction" : "scalar"; }

MetricUnit parse_unit(const std::string& s) {
  if (s == "fraction") return MetricUnit::fraction;
  if (s == "scalar") return MetricUnit::scalar;
  throw ParseError("<report>", 0, "unknown metric unit \"" + s + "\"");
}

std::string display_name(const std::string& name) {
  static const std::map<std::string, std::string> kNames = {
      {"content_recall", "C. Recall"}, {"dist_1", "Dist-1"},       {"dist_2", "Dist-2"},
      {"head_entropy", "H. Ent"},      {"self_bleu", "S-BLEU"},    {"fd", "FD"},
      {"bleu1_mtv", "B-1 (MTV)"},      {"bleu2_mtv", "B-2 (MTV)"}, {"bleu1_single", "B-1 (w/o MTV)"},
      {"bleu2_single", "B-2 (w/o MTV)"}, {"original", "Original"}, {"stripped", "Stripped"},
      {"drop", "Drop"},                {"chance", "Chance"},       {"mean", "Mean"},
      {"std", "Std"}};
  if (auto it = kNames.find(name); it != kNames.end()) return it->second;
  if (name.starts_with("acc_") && name.ends_with("way"))
    return name.substr(4, name.size() - 7) + "-Way";
  return name;
}

std::string first_column(const std::string& kind) {
  if (kind == "noise_dependency") return "Input";
  if (kind == "prefix_strip") return "Metric";
  if (kind == "attribute_baselines") return "Task";
  if (kind == "retrieval") return "N";
  return "Model";
}

std::string md_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out.push_back(c);
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

std::string format_fixed(double v, int decimals, double scale) {
  const double p = std::pow(10.0, decimals);
  const double x = v * scale * p;
  // Half away from zero; the tiny nudge absorbs binary representation error (0.0785 -> 7.85).
  const double r = std::copysign(std::floor(std::abs(x) + 0.5 + 1e-9), x) / p;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, r == 0.0 ? 0.0 : r);
  return buf;
}

}  // namespace

const Metric* ReportRow::find(std::string_view name) const {
  for (const auto& m : cells)
    if (m.name == name) return &m;
  return nullptr;
}

ReportRow& MetricReport::add_row(std::string label) {
  rows.push_back({std::move(label), {}});
  return rows.back();
}

double MetricReport::metric(std::string_view row, std::string_view name) const {
  for (const auto& r : rows)
    if (r.label == row)
      if (const auto* m = r.find(name)) return m->value;
  throw InvalidArgument("report has no metric \"" + std::string(name) + "\" in row \"" + std::string(row) + "\"");
}

double MetricReport::metric(std::string_view name) const {
  if (rows.empty()) throw InvalidArgument("report has no rows");
  return metric(rows.front().label, name);
}

std::optional<std::string> MetricReport::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return v;
  return std::nullopt;
}

std::string fingerprint(const KeyValues& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : config) {
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

KeyValues ProtocolConfig::describe() const {
  auto bleu_desc = [](const BleuConfig& b) {
    std::string s = "order=" + std::to_string(b.max_order) + ",smoothing=";
    s += b.smoothing == Smoothing::none ? "none" : "epsilon:" + to_string(b.epsilon);
    return s;
  };
  std::string ways;
  for (std::size_t i = 0; i < n_ways.size(); ++i) ways += (i ? "," : "") + std::to_string(n_ways[i]);
  std::string prefix_list;
  for (std::size_t i = 0; i < prefixes.size(); ++i) prefix_list += (i ? "|" : "") + prefixes[i].joined();
  return {
      {"tokenizer", "unicode-whitespace+edge-punctuation,case-sensitive"},
      {"retrieval.n_ways", ways},
      {"retrieval.runs", std::to_string(retrieval_runs)},
      {"retrieval.sampling", "uniform-without-replacement,splitmix64-counter"},
      {"seed", std::to_string(seed)},
      {"self_bleu", bleu_desc(self_bleu)},
      {"bleu", bleu_desc(bleu)},
      {"dist.denominator", dist_denominator == DistDenominator::tokens ? "tokens" : "ngrams"},
      {"content_recall.aggregation", recall_aggregation == Aggregation::micro ? "micro" : "macro"},
      {"content_recall.stopwords", stopword_source + " (" + std::to_string(stopwords.size()) + " words)"},
      {"head_entropy.base", "2"},
      {"prefixes", prefix_list},
      {"embeddings.normalize", normalize_embeddings ? "true" : "false"},
      {"embeddings.source", embedding_source},
      {"embeddings.model", embedding_model},
  };
}

MetricReport run_main_eval(const std::vector<Sample>& corpus, const HypothesisSet& hyps,
                           const EmbeddingPair& embeddings, const ProtocolConfig& cfg) {
  MetricReport r;
  r.kind = "main_eval";
  r.system_name = hyps.system_name;
  r.condition = std::string(to_string(hyps.condition));
  const auto samples = evaluated_samples(corpus, hyps, r.warnings);
  const auto ids = ids_of(samples);
  const auto hyp_emb = aligned_embeddings(embeddings.hyp, ids, "hypothesis", false);
  const auto ref_emb = aligned_embeddings(embeddings.ref, ids, "reference", false);
  const auto hyp_tokens = tokenize_hyps(samples, hyps);

  ReportRow row{hyps.system_name, {}};
  ReportRow spread{"retrieval_std", {}};
  for (int n : cfg.n_ways) {
    if (static_cast<std::size_t>(n) > ids.size()) {
      r.warnings.push_back(std::to_string(n) + "-way retrieval skipped: only " + std::to_string(ids.size()) +
                           " samples");
      continue;
    }
    RetrievalConfig rc{n, cfg.retrieval_runs, cfg.seed, cfg.threads};
    const auto res = nway_retrieval_accuracy(hyp_emb, ref_emb, rc);
    add(row, way_name(n), res.mean_accuracy, MetricUnit::fraction);
    add(spread, way_name(n), res.std, MetricUnit::fraction);
  }
  add(row, "content_recall", content_recall_of(samples, hyp_tokens, cfg), MetricUnit::fraction);
  add(row, "dist_1", dist_n(hyp_tokens, 1, cfg.dist_denominator), MetricUnit::fraction);
  add(row, "dist_2", dist_n(hyp_tokens, 2, cfg.dist_denominator), MetricUnit::fraction);
  const auto he = head_entropy(hyp_tokens);
  add(row, "head_entropy", he.bits, MetricUnit::scalar);
  if (he.skipped) r.warnings.push_back(std::to_string(he.skipped) + " hypotheses shorter than two tokens skipped by Head Entropy");
  add(row, "self_bleu", self_bleu(hyp_tokens, cfg.self_bleu), MetricUnit::fraction);
  const auto g_ref = fit_gaussian(cfg.normalize_embeddings ? ref_emb.normalized() : ref_emb);
  const auto g_hyp = fit_gaussian(cfg.normalize_embeddings ? hyp_emb.normalized() : hyp_emb);
  add(row, "fd", frechet_distance(g_ref, g_hyp), MetricUnit::scalar);
  r.rows.push_back(std::move(row));
  r.rows.push_back(std::move(spread));

  r.attributes = {
      {"content_words", "approximated as tokens outside the stop list (no POS tagging)"},
      {"retrieval.queries", "hypothesis embeddings"},
      {"retrieval.candidates", "reference embeddings"},
      {"evaluated_samples", std::to_string(ids.size())},
  };
  finish(r, cfg);
  return r;
}

MetricReport bleu_trap_analysis(const std::vector<Sample>& corpus, const HypothesisSet& hyps,
                                const ProtocolConfig& cfg) {
  MetricReport r;
  r.kind = "bleu_trap";
  r.system_name = hyps.system_name;
  r.condition = std::string(to_string(hyps.condition));
  const auto samples = evaluated_samples(corpus, hyps, r.warnings);

  std::vector<BleuPair> mtv, single;
  for (const auto* s : samples) {
    if (s->mtv_variants.empty())
      throw InvalidArgument("sample \"" + s->id + "\" has an empty MTV pool; MTV scoring needs variants for every sample");
    auto hyp = tokenize(hyps.at(s->id));
    BleuPair m{hyp, {tokenize(s->ground_truth)}};
    for (const auto& v : s->mtv_variants) m.refs.push_back(tokenize(v));
    single.push_back({std::move(hyp), {m.refs.front()}});
    mtv.push_back(std::move(m));
  }
  ReportRow corpus_row{hyps.system_name, {}};
  ReportRow sentence_row{"sentence_mean", {}};
  for (int n = 1; n <= 2; ++n) {
    add(corpus_row, "bleu" + std::to_string(n) + "_mtv", corpus_bleu(mtv, n, cfg.bleu).value, MetricUnit::fraction);
    add(sentence_row, "bleu" + std::to_string(n) + "_mtv", mean_sentence_bleu(mtv, n, cfg.bleu), MetricUnit::fraction);
  }
  for (int n = 1; n <= 2; ++n) {
    add(corpus_row, "bleu" + std::to_string(n) + "_single", corpus_bleu(single, n, cfg.bleu).value, MetricUnit::fraction);
    add(sentence_row, "bleu" + std::to_string(n) + "_single", mean_sentence_bleu(single, n, cfg.bleu),
        MetricUnit::fraction);
  }
  r.rows.push_back(std::move(corpus_row));
  r.rows.push_back(std::move(sentence_row));
  r.attributes = {{"aggregation", "first row: corpus-level (summed counts); sentence_mean: mean of sentence BLEU"},
                  {"mtv_pool", "ground truth plus all variants"}};
  finish(r, cfg);
  return r;
}

MetricReport noise_dependency_report(const std::vector<Sample>& corpus, const HypothesisSet& real_hyps,
                                     const HypothesisSet& noise_hyps, const NoiseEmbeddings& embeddings,
                                     const ProtocolConfig& cfg) {
  if (real_hyps.condition != Condition::real || noise_hyps.condition != Condition::noise)
    throw InvalidArgument("noise dependency needs one hypothesis set tagged real and one tagged noise");
  MetricReport r;
  r.kind = "noise_dependency";
  r.system_name = real_hyps.system_name;
  const auto samples = evaluated_samples(corpus, real_hyps, r.warnings);
  std::set<std::string> real_ids(real_hyps.order.begin(), real_hyps.order.end());
  std::set<std::string> noise_ids(noise_hyps.order.begin(), noise_hyps.order.end());
  if (real_ids != noise_ids) throw InvalidArgument("real and noise hypothesis sets cover different ids");
  const auto ids = ids_of(samples);
  const auto ref_emb = aligned_embeddings(embeddings.ref, ids, "reference", cfg.normalize_embeddings);
  const auto g_ref = fit_gaussian(ref_emb);

  struct Cells {
    double recall, dist2, fd;
  };
  auto measure = [&](const HypothesisSet& h, const EmbeddingMatrix& e, const char* role) {
    const auto tokens = tokenize_hyps(samples, h);
    const auto emb = aligned_embeddings(e, ids, role, cfg.normalize_embeddings);
    return Cells{content_recall_of(samples, tokens, cfg), dist_n(tokens, 2, cfg.dist_denominator),
                 frechet_distance(g_ref, fit_gaussian(emb))};
  };
  const auto real = measure(real_hyps, embeddings.real_hyp, "real-condition");
  const auto noise = measure(noise_hyps, embeddings.noise_hyp, "noise-condition");

  auto emit = [&](const std::string& label, const Cells& c) {
    auto& row = r.add_row(label);
    add(row, "content_recall", c.recall, MetricUnit::fraction);
    add(row, "dist_2", c.dist2, MetricUnit::fraction);
    add(row, "fd", c.fd, MetricUnit::scalar);
  };
  emit("real", real);
  emit("noise", noise);
  emit("delta", {noise.recall - real.recall, noise.dist2 - real.dist2, noise.fd - real.fd});

  const bool verdict = noise.recall < real.recall && noise.fd > real.fd;
  r.attributes = {{"signal_dependency_verdict", verdict ? "true" : "false"},
                  {"verdict_rule", "noise content_recall < real AND noise fd > real"},
                  {"noise_system", noise_hyps.system_name}};
  finish(r, cfg);
  return r;
}

MetricReport prefix_strip_analysis(const std::vector<Sample>& corpus, const HypothesisSet& hyps,
                                   const std::vector<TokenSequence>& prefixes, const ProtocolConfig& cfg) {
  if (prefixes.empty()) throw InvalidArgument("prefix list is empty");
  MetricReport r;
  r.kind = "prefix_strip";
  r.system_name = hyps.system_name;
  r.condition = std::string(to_string(hyps.condition));
  const auto samples = evaluated_samples(corpus, hyps, r.warnings);
  std::vector<BleuPair> original, stripped;
  std::size_t touched = 0;
  for (const auto* s : samples) {
    auto hyp = tokenize(hyps.at(s->id));
    auto ref = tokenize(s->ground_truth);
    auto hyp_s = strip_prefixes(hyp, prefixes);
    auto ref_s = strip_prefixes(ref, prefixes);
    touched += (hyp_s.size() != hyp.size()) + (ref_s.size() != ref.size());
    original.push_back({std::move(hyp), {std::move(ref)}});
    stripped.push_back({std::move(hyp_s), {std::move(ref_s)}});
  }
  for (int n = 1; n <= 4; ++n) {
    const double before = corpus_bleu(original, n, cfg.bleu).value;
    const double after = corpus_bleu(stripped, n, cfg.bleu).value;
    auto& row = r.add_row("BLEU-" + std::to_string(n));
    add(row, "original", before, MetricUnit::fraction);
    add(row, "stripped", after, MetricUnit::fraction);
    double drop = 0.0;
    if (before > 0.0)
      drop = (after - before) / before;
    else if (after > 0.0)
      r.warnings.push_back("BLEU-" + std::to_string(n) + " is zero before stripping; relative change reported as 0");
    add(row, "drop", drop, MetricUnit::fraction);
  }
  r.attributes = {{"stripped_sentences", std::to_string(touched)},
                  {"strip_sides", "reference and hypothesis"}};
  auto cfg_with_prefixes = cfg;
  cfg_with_prefixes.prefixes = prefixes;
  finish(r, cfg_with_prefixes);
  return r;
}

MetricReport attribute_baselines(const std::vector<AttributeLabels>& train, const std::vector<AttributeLabels>& eval,
                                 const LabelSets& classes) {
  if (train.empty() || eval.empty()) throw InvalidArgument("attribute baselines need non-empty train and eval labels");
  MetricReport r;
  r.kind = "attribute_baselines";

  auto categorical = [&](const char* label, auto field, const std::vector<std::string>& configured) {
    std::set<std::string> seen(configured.begin(), configured.end());
    const bool fixed = !configured.empty();
    std::size_t present = 0;
    for (const auto* split : {&train, &eval})
      for (const auto& a : *split) {
        const auto& v = a.*field;
        if (!v) continue;
        ++present;
        if (fixed && !seen.count(*v))
          throw InvalidArgument(std::string(label) + " label \"" + *v + "\" is outside the configured class set");
        seen.insert(*v);
      }
    if (present == 0) {
      r.warnings.push_back(std::string(label) + ": no labels present, row omitted");
      return;
    }
    auto& row = r.add_row(label);
    add(row, "chance", 1.0 / static_cast<double>(seen.size()), MetricUnit::fraction);
    add(row, "classes", static_cast<double>(seen.size()), MetricUnit::scalar);
  };

  auto regression = [&](const char* label, auto get) {
    std::vector<double> tr, ev;
    for (const auto& a : train)
      if (auto v = get(a)) tr.push_back(*v);
    for (const auto& a : eval)
      if (auto v = get(a)) ev.push_back(*v);
    if (tr.empty() || ev.empty()) {
      r.warnings.push_back(std::string(label) + ": labels missing in train or eval, row omitted");
      return;
    }
    std::sort(tr.begin(), tr.end());
    const auto n = tr.size();
    const double median = n % 2 ? tr[n / 2] : (tr[n / 2 - 1] + tr[n / 2]) / 2.0;
    double sum = 0.0;
    for (double y : ev) sum += std::abs(y - median);
    auto& row = r.add_row(label);
    add(row, "chance", sum / static_cast<double>(ev.size()), MetricUnit::scalar);
    add(row, "train_median", median, MetricUnit::scalar);
  };

  categorical("Topic", &AttributeLabels::topic, classes.topic);
  categorical("Sentiment", &AttributeLabels::sentiment, classes.sentiment);
  regression("Length", [](const AttributeLabels& a) -> std::optional<double> {
    return a.length ? std::optional<double>(static_cast<double>(*a.length)) : std::nullopt;
  });
  regression("Surprisal", [](const AttributeLabels& a) { return a.surprisal; });
  if (r.rows.empty()) throw InvalidArgument("no attribute labels present in either split");

  r.attributes = {{"classification", "chance accuracy = 1 / number of classes"},
                  {"regression", "MAE of predicting the training-set median"}};
  r.config = {{"train_size", std::to_string(train.size())}, {"eval_size", std::to_string(eval.size())}};
  r.config_fingerprint = fingerprint(r.config);
  return r;
}

MetricReport retrieval_report(const EmbeddingMatrix& queries, const EmbeddingMatrix& candidates,
                              const ProtocolConfig& cfg) {
  MetricReport r;
  r.kind = "retrieval";
  const auto q = cfg.normalize_embeddings ? queries.normalized() : queries;
  const auto c = cfg.normalize_embeddings ? candidates.normalized() : candidates;
  for (int n : cfg.n_ways) {
    const auto res = nway_retrieval_accuracy(q, c, {n, cfg.retrieval_runs, cfg.seed, cfg.threads});
    auto& row = r.add_row(std::to_string(n) + "-Way");
    add(row, "mean", res.mean_accuracy, MetricUnit::fraction);
    add(row, "std", res.std, MetricUnit::fraction);
  }
  finish(r, cfg);
  return r;
}

MetricReport fd_report(const EmbeddingMatrix& ref, const EmbeddingMatrix& hyp, const ProtocolConfig& cfg) {
  MetricReport r;
  r.kind = "fd";
  ref.validate();
  hyp.validate();
  const auto g_ref = fit_gaussian(cfg.normalize_embeddings ? ref.normalized() : ref);
  const auto g_hyp = fit_gaussian(cfg.normalize_embeddings ? hyp.normalized() : hyp);
  auto& row = r.add_row("fd");
  add(row, "fd", frechet_distance(g_ref, g_hyp), MetricUnit::scalar);
  r.attributes = {{"ref_count", std::to_string(ref.rows())}, {"hyp_count", std::to_string(hyp.rows())}};
  finish(r, cfg);
  return r;
}

double relative_improvement(double ours, double base, bool higher_is_better) {
  if (base == 0.0) throw InvalidArgument("relative improvement against a zero baseline");
  return higher_is_better ? (ours - base) / base : (base - ours) / base;
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  throw InvalidArgument("unknown report format \"" + std::string(s) + "\" (expected json|csv|markdown)");
}

std::string format_percent(double fraction) { return format_fixed(fraction, 1, 100.0) + "%"; }

std::string format_scalar(double value) { return format_fixed(value, 2, 1.0); }

std::string render_report(const MetricReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: {
      ordered_json j;
      j["kind"] = r.kind;
      j["system_name"] = r.system_name;
      j["condition"] = r.condition;
      auto& rows = j["rows"] = ordered_json::array();
      for (const auto& row : r.rows) {
        ordered_json jr;
        jr["label"] = row.label;
        auto& cells = jr["metrics"] = ordered_json::array();
        for (const auto& m : row.cells) cells.push_back({{"name", m.name}, {"value", m.value}, {"unit", unit_name(m.unit)}});
        rows.push_back(std::move(jr));
      }
      auto kv = [](const KeyValues& values) {
        ordered_json o = ordered_json::object();
        for (const auto& [k, v] : values) o[k] = v;
        return o;
      };
      j["attributes"] = kv(r.attributes);
      j["config"] = kv(r.config);
      j["config_fingerprint"] = r.config_fingerprint;
      j["warnings"] = r.warnings;
      return j.dump(2) + "\n";
    }
    case ReportFormat::csv: {
      std::string out = "row,metric,value,unit\n";
      for (const auto& row : r.rows)
        for (const auto& m : row.cells)
          out += csv_field(row.label) + "," + csv_field(m.name) + "," + to_string(m.value) + "," + unit_name(m.unit) + "\n";
      return out;
    }
    case ReportFormat::markdown: {
      std::vector<std::string> columns;
      for (const auto& row : r.rows)
        for (const auto& m : row.cells)
          if (std::find(columns.begin(), columns.end(), m.name) == columns.end()) columns.push_back(m.name);
      std::string out = "## " + r.kind;
      if (!r.system_name.empty()) out += ": " + md_escape(r.system_name);
      if (!r.condition.empty()) out += " (" + r.condition + ")";
      out += "\n\n| " + first_column(r.kind);
      for (const auto& c : columns) out += " | " + md_escape(display_name(c));
      out += " |\n|---";
      for (std::size_t i = 0; i < columns.size(); ++i) out += "|---";
      out += "|\n";
      for (const auto& row : r.rows) {
        out += "| " + md_escape(row.label);
        for (const auto& c : columns) {
          const auto* m = row.find(c);
          out += " | ";
          if (m) out += m->unit == MetricUnit::fraction ? format_percent(m->value) : format_scalar(m->value);
        }
        out += " |\n";
      }
      if (!r.attributes.empty()) {
        out += "\n";
        for (const auto& [k, v] : r.attributes) out += "- " + k + ": " + md_escape(v) + "\n";
      }
      if (!r.warnings.empty()) {
        out += "\nWarnings:\n";
        for (const auto& w : r.warnings) out += "- " + md_escape(w) + "\n";
      }
      out += "\nConfig fingerprint: `" + r.config_fingerprint + "`\n";
      return out;
    }
  }
  return {};
}

MetricReport parse_report_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("<report>", 0, e.what());
  }
  try {
    MetricReport r;
    r.kind = j.at("kind").get<std::string>();
    r.system_name = j.at("system_name").get<std::string>();
    r.condition = j.at("condition").get<std::string>();
    for (const auto& jr : j.at("rows")) {
      ReportRow row{jr.at("label").get<std::string>(), {}};
      for (const auto& m : jr.at("metrics"))
        row.cells.push_back({m.at("name").get<std::string>(), m.at("value").get<double>(),
                             parse_unit(m.at("unit").get<std::string>())});
      r.rows.push_back(std::move(row));
    }
    for (const auto& [k, v] : j.at("attributes").items()) r.attributes.emplace_back(k, v.get<std::string>());
    for (const auto& [k, v] : j.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("<report>", 0, std::string("report JSON does not match the schema: ") + e.what());
  }
}

}  // namespace semeval
