#include "semeval/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "semeval/corpus.hpp"
#include "semeval/embed_client.hpp"
#include "semeval/embedding_io.hpp"
#include "semeval/error.hpp"
#include "semeval/protocol.hpp"
#include "semeval/selftest.hpp"

namespace semeval {
namespace {

constexpr const char* kEndpointEnv = "SEMEVAL_EMBED_ENDPOINT";

class UsageError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "usage_error"; }
};

// Options shared by every subcommand.
struct Common {
  std::uint64_t seed = ProtocolConfig{}.seed;
  unsigned threads = 0;
  std::string format;
  std::string out;
};

struct MetricKnobs {
  std::vector<int> n_ways{2, 4, 10, 24};
  int runs = 10;
  int self_bleu_order = 4;
  double self_bleu_epsilon = 1e-9;
  std::string dist_denominator = "tokens";
  std::string recall_aggregation = "micro";
  std::string stopwords;
  bool normalize = false;
  std::string smoothing = "none";
  double epsilon = 1e-9;
};

struct EmbedSource {
  std::string endpoint;
  std::size_t batch = 64;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", "key = value file; keys are long flag names without dashes, flags win over it")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "Seed for all randomness");
  sub->add_option("--threads", c.threads, "Worker threads (0 = available parallelism)");
  sub->add_option("--format", c.format, "Report format: json|csv|markdown (default from --out extension, else json)");
  sub->add_option("--out", c.out, "Output path (default stdout)");
}

// Turns the subcommand's --config entries into command-line tokens placed right
// after the subcommand name. Entries for options already on the command line are
// dropped so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
  std::size_t sub_pos = 0;
  while (sub_pos < args.size() && args[sub_pos].starts_with("-")) ++sub_pos;
  if (sub_pos == args.size()) return args;
  CLI::App* sub = app.get_subcommand_no_throw(args[sub_pos]);
  if (!sub) return args;

  std::string path;
  std::vector<const CLI::Option*> given;
  for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
    if (!args[i].starts_with("--")) continue;
    const auto eq = args[i].find('=');
    const auto name = args[i].substr(0, eq);
    if (name == "--config") {
      if (eq != std::string::npos)
        path = args[i].substr(eq + 1);
      else if (i + 1 < args.size())
        path = args[i + 1];
    }
    if (const auto* opt = sub->get_option_no_throw(name)) given.push_back(opt);
  }
  if (path.empty()) return args;

  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::Error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  std::vector<std::string> injected;
  for (const auto& item : items) {
    const auto key = item.fullname();
    const auto* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
    if (!opt) throw UsageError("config " + path + ": unknown key \"" + key + "\" for " + sub->get_name());
    if (std::find(given.begin(), given.end(), opt) != given.end()) continue;
    std::string value;
    for (const auto& in : item.inputs) value += (value.empty() ? "" : ",") + in;
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1")
        injected.push_back("--" + key);
      else if (value != "false" && value != "0")
        throw UsageError("config " + path + ": flag \"" + key + "\" expects true or false");
      continue;
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos + 1));
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos + 1), args.end());
  return out;
}

ReportFormat resolve_format(const Common& c) {
  if (!c.format.empty()) return parse_report_format(c.format);
  if (c.out.ends_with(".csv")) return ReportFormat::csv;
  if (c.out.ends_with(".md")) return ReportFormat::markdown;
  return ReportFormat::json;
}

void emit(const std::string& bytes, const Common& c, std::ostream& out) {
  if (c.out.empty()) {
    out << bytes;
    return;
  }
  std::ofstream f(c.out, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + c.out + " for writing");
  f << bytes;
  if (!f) throw IoError("write failed: " + c.out);
}

ProtocolConfig protocol_config(const Common& c, const MetricKnobs& k) {
  ProtocolConfig cfg;
  cfg.seed = c.seed;
  cfg.threads = c.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : c.threads;
  cfg.n_ways = k.n_ways;
  cfg.retrieval_runs = k.runs;
  cfg.self_bleu.max_order = k.self_bleu_order;
  cfg.self_bleu.epsilon = k.self_bleu_epsilon;
  cfg.self_bleu.validate();
  if (k.smoothing == "none")
    cfg.bleu.smoothing = Smoothing::none;
  else if (k.smoothing == "epsilon")
    cfg.bleu.smoothing = Smoothing::epsilon;
  else
    throw UsageError("--smoothing must be none|epsilon");
  cfg.bleu.epsilon = k.epsilon;
  cfg.bleu.validate();
  if (k.dist_denominator == "tokens")
    cfg.dist_denominator = DistDenominator::tokens;
  else if (k.dist_denominator == "ngrams")
    cfg.dist_denominator = DistDenominator::ngrams;
  else
    throw UsageError("--dist-denominator must be tokens|ngrams");
  if (k.recall_aggregation == "micro")
    cfg.recall_aggregation = Aggregation::micro;
  else if (k.recall_aggregation == "macro")
    cfg.recall_aggregation = Aggregation::macro;
  else
    throw UsageError("--recall-aggregation must be micro|macro");
  if (!k.stopwords.empty()) {
    cfg.stopwords = StopwordList::load(k.stopwords);
    cfg.stopword_source = "file:" + std::filesystem::path(k.stopwords).filename().string();
  }
  cfg.normalize_embeddings = k.normalize;
  return cfg;
}

std::string resolve_endpoint(const EmbedSource& src) {
  if (!src.endpoint.empty()) return src.endpoint;
  if (const char* env = std::getenv(kEndpointEnv); env && *env) return env;
  return {};
}

// One embedding role: a file, or texts fetched from the service.
EmbeddingMatrix embeddings_for(const std::string& file, const char* flag, const EmbedSource& src,
                               const std::vector<std::string>& ids, const std::vector<std::string>& texts,
                               ProtocolConfig& cfg) {
  if (!file.empty()) {
    if (!src.endpoint.empty())
      throw UsageError(std::string("both ") + flag + " and --embed-endpoint given; choose one embedding source");
    return load_embeddings(file);
  }
  const auto endpoint = resolve_endpoint(src);
  if (endpoint.empty())
    throw UsageError(std::string(flag) + " is required (or --embed-endpoint / " + kEndpointEnv + ")");
  EmbedClientOptions opts;
  opts.batch_size = src.batch;
  opts.normalize = cfg.normalize_embeddings;
  auto fetched = fetch_embeddings_detailed(texts, endpoint, opts, ids);
  cfg.embedding_source = "service";
  cfg.embedding_model = fetched.model;
  return std::move(fetched.matrix);
}

std::vector<std::string> texts_of(const std::vector<Sample>& corpus, const HypothesisSet* hyps,
                                  std::vector<std::string>& ids) {
  std::vector<std::string> texts;
  for (const auto& s : corpus) {
    if (hyps && !hyps->contains(s.id)) continue;
    ids.push_back(s.id);
    texts.push_back(hyps ? hyps->at(s.id) : s.ground_truth);
  }
  return texts;
}

std::vector<AttributeLabels> labels_of(const std::vector<Sample>& corpus) {
  std::vector<AttributeLabels> out;
  for (const auto& s : corpus) out.push_back(s.attributes);
  return out;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void add_metric_knobs(CLI::App* sub, MetricKnobs& k, bool retrieval, bool text) {
  if (retrieval) {
    sub->add_option("--n-way,--n", k.n_ways, "Retrieval N values")->delimiter(',')->check(CLI::Range(2, 1 << 20));
    sub->add_option("--runs", k.runs, "Retrieval repetitions")->check(CLI::PositiveNumber);
  }
  if (text) {
    sub->add_option("--stopwords", k.stopwords, "Stop list file (default: built-in English list)")
        ->check(CLI::ExistingFile);
    sub->add_option("--self-bleu-order", k.self_bleu_order, "Self-BLEU max order")->check(CLI::Range(1, 4));
    sub->add_option("--self-bleu-epsilon", k.self_bleu_epsilon, "Self-BLEU epsilon smoothing");
    sub->add_option("--dist-denominator", k.dist_denominator, "tokens|ngrams");
    sub->add_option("--recall-aggregation", k.recall_aggregation, "micro|macro");
  }
  sub->add_flag("--normalize", k.normalize, "L2-normalize embeddings before FD/retrieval");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"semeval: holistic evaluation of brain-to-text decoders", "semeval"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Common common;
  MetricKnobs knobs;
  EmbedSource embed;
  std::string refs, hyps_path, emb_refs, emb_hyps, system_name, condition;
  std::string real_hyps, noise_hyps, emb_real, emb_noise, emb_queries, emb_candidates, prefixes_path;
  std::string train_path, eval_path, sentiment_classes, topic_classes, export_format = "jsonl";
  std::vector<std::string> export_inputs;

  auto add_embed_source = [&](CLI::App* sub) {
    sub->add_option("--embed-endpoint", embed.endpoint,
                    std::string("Embedding service address (fallback: $") + kEndpointEnv + ")");
    sub->add_option("--embed-batch", embed.batch, "Texts per service request")->check(CLI::PositiveNumber);
  };
  auto add_hyp_meta = [&](CLI::App* sub) {
    sub->add_option("--system-name", system_name, "Override the system name from the hypothesis header");
    sub->add_option("--condition", condition, "Override the condition: real|noise");
  };

  auto* eval = app.add_subcommand("eval", "Main table: retrieval, substance, diversity and quality metrics");
  eval->add_option("--refs", refs, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--hyps", hyps_path, "Hypothesis JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--emb-refs", emb_refs, "Reference embeddings (.semb or .jsonl)")->check(CLI::ExistingFile);
  eval->add_option("--emb-hyps", emb_hyps, "Hypothesis embeddings (.semb or .jsonl)")->check(CLI::ExistingFile);
  add_embed_source(eval);
  add_hyp_meta(eval);
  add_metric_knobs(eval, knobs, true, true);
  add_common(eval, common);

  auto* bleu = app.add_subcommand("bleu", "BLEU-1/2 with and without the MTV reference pool");
  bleu->add_option("--refs", refs, "Corpus JSONL with mtv variants")->required()->check(CLI::ExistingFile);
  bleu->add_option("--hyps", hyps_path, "Hypothesis JSONL")->required()->check(CLI::ExistingFile);
  bleu->add_option("--smoothing", knobs.smoothing, "none|epsilon");
  bleu->add_option("--epsilon", knobs.epsilon, "Epsilon for epsilon smoothing");
  add_hyp_meta(bleu);
  add_common(bleu, common);

  auto* retrieval = app.add_subcommand("retrieval", "N-way retrieval accuracy between two embedding sets");
  retrieval->add_option("--emb-queries", emb_queries, "Query embeddings")->required()->check(CLI::ExistingFile);
  retrieval->add_option("--emb-candidates", emb_candidates, "Candidate embeddings")->required()->check(CLI::ExistingFile);
  add_metric_knobs(retrieval, knobs, true, false);
  add_common(retrieval, common);

  auto* fd = app.add_subcommand("fd", "Frechet distance between two embedding sets");
  fd->add_option("--emb-refs", emb_refs, "Reference embeddings")->required()->check(CLI::ExistingFile);
  fd->add_option("--emb-hyps", emb_hyps, "Hypothesis embeddings")->required()->check(CLI::ExistingFile);
  add_metric_knobs(fd, knobs, false, false);
  add_common(fd, common);

  auto* noise = app.add_subcommand("noise", "Real vs. noise input comparison and signal-dependency verdict");
  noise->add_option("--refs", refs, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  noise->add_option("--real-hyps", real_hyps, "Hypotheses decoded from real input")->required()->check(CLI::ExistingFile);
  noise->add_option("--noise-hyps", noise_hyps, "Hypotheses decoded from noise input")->required()->check(CLI::ExistingFile);
  noise->add_option("--emb-refs", emb_refs, "Reference embeddings")->check(CLI::ExistingFile);
  noise->add_option("--emb-real", emb_real, "Embeddings of the real-input hypotheses")->check(CLI::ExistingFile);
  noise->add_option("--emb-noise", emb_noise, "Embeddings of the noise-input hypotheses")->check(CLI::ExistingFile);
  add_embed_source(noise);
  add_metric_knobs(noise, knobs, false, true);
  add_common(noise, common);

  auto* prefix = app.add_subcommand("prefix", "Corpus BLEU-1..4 before and after stripping common prefixes");
  prefix->add_option("--refs", refs, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  prefix->add_option("--hyps", hyps_path, "Hypothesis JSONL")->required()->check(CLI::ExistingFile);
  prefix->add_option("--prefixes", prefixes_path, "Prefix list file (default: \"The movie\", \"He was\")")
      ->check(CLI::ExistingFile);
  prefix->add_option("--smoothing", knobs.smoothing, "none|epsilon");
  prefix->add_option("--epsilon", knobs.epsilon, "Epsilon for epsilon smoothing");
  add_hyp_meta(prefix);
  add_common(prefix, common);

  auto* baselines = app.add_subcommand("baselines", "Chance and median-predictor baselines for attribute heads");
  baselines->add_option("--train", train_path, "Training corpus JSONL with attribute labels")->required()->check(CLI::ExistingFile);
  baselines->add_option("--eval", eval_path, "Evaluation corpus JSONL with attribute labels")->required()->check(CLI::ExistingFile);
  baselines->add_option("--sentiment-classes", sentiment_classes, "Comma-separated sentiment class set");
  baselines->add_option("--topic-classes", topic_classes, "Comma-separated topic class set");
  add_common(baselines, common);

  auto* export_cmd = app.add_subcommand("embed-export", "Merge labeled embedding sets into one file for projection tools");
  export_cmd->add_option("--input", export_inputs, "label=path (repeatable)")->required();
  export_cmd->add_option("--export-format", export_format, "jsonl|binary");
  add_common(export_cmd, common);

  auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle checks");
  add_common(selftest, common);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
      args = expand_config(args, app);
    } catch (const UsageError& e) {
      err << "semeval: error: usage_error: " << e.what() << "\n";
      return 2;
    }
    // CLI11 consumes the vector form back to front.
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "semeval: error: usage_error: " << e.what() << "\n";
    err << app.help();
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    const auto format = resolve_format(common);
    auto cfg = protocol_config(common, knobs);
    auto load_hyps = [&](const std::string& path, std::optional<Condition> forced) {
      std::optional<std::string> name;
      if (!system_name.empty()) name = system_name;
      std::optional<Condition> cond = forced;
      if (!cond && !condition.empty()) cond = parse_condition(condition);
      return load_hypotheses(path, name, cond);
    };

    MetricReport report;
    if (sub == eval) {
      const auto corpus = load_corpus(refs);
      const auto hyps = load_hyps(hyps_path, std::nullopt);
      check_hypotheses_against(hyps, corpus);
      std::vector<std::string> ref_ids, hyp_ids;
      const auto ref_texts = texts_of(corpus, &hyps, ref_ids);
      std::vector<std::string> hyp_texts;
      for (const auto& id : ref_ids) hyp_texts.push_back(hyps.at(id));
      EmbeddingPair emb;
      emb.ref = embeddings_for(emb_refs, "--emb-refs", embed, ref_ids, ref_texts, cfg);
      emb.hyp = embeddings_for(emb_hyps, "--emb-hyps", embed, ref_ids, hyp_texts, cfg);
      report = run_main_eval(corpus, hyps, emb, cfg);
    } else if (sub == bleu) {
      const auto corpus = load_corpus(refs);
      report = bleu_trap_analysis(corpus, load_hyps(hyps_path, std::nullopt), cfg);
    } else if (sub == retrieval) {
      report = retrieval_report(load_embeddings(emb_queries), load_embeddings(emb_candidates), cfg);
    } else if (sub == fd) {
      report = fd_report(load_embeddings(emb_refs), load_embeddings(emb_hyps), cfg);
    } else if (sub == noise) {
      const auto corpus = load_corpus(refs);
      const auto real = load_hyps(real_hyps, Condition::real);
      const auto noisy = load_hyps(noise_hyps, Condition::noise);
      check_hypotheses_against(real, corpus);
      std::vector<std::string> ids, unused;
      const auto ref_texts = texts_of(corpus, &real, ids);
      std::vector<std::string> real_texts, noise_texts;
      for (const auto& id : ids) {
        real_texts.push_back(real.at(id));
        noise_texts.push_back(noisy.at(id));
      }
      NoiseEmbeddings emb;
      emb.ref = embeddings_for(emb_refs, "--emb-refs", embed, ids, ref_texts, cfg);
      emb.real_hyp = embeddings_for(emb_real, "--emb-real", embed, ids, real_texts, cfg);
      emb.noise_hyp = embeddings_for(emb_noise, "--emb-noise", embed, ids, noise_texts, cfg);
      report = noise_dependency_report(corpus, real, noisy, emb, cfg);
    } else if (sub == prefix) {
      const auto corpus = load_corpus(refs);
      auto list = prefixes_path.empty() ? default_prefixes() : load_prefixes(prefixes_path);
      report = prefix_strip_analysis(corpus, load_hyps(hyps_path, std::nullopt), list, cfg);
    } else if (sub == baselines) {
      LabelSets classes{split_csv(sentiment_classes), split_csv(topic_classes)};
      report = attribute_baselines(labels_of(load_corpus(train_path)), labels_of(load_corpus(eval_path)), classes);
    } else if (sub == export_cmd) {
      std::vector<LabeledEmbeddings> sets;
      for (const auto& item : export_inputs) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--input expects label=path, got \"" + item + "\"");
        sets.emplace_back(item.substr(0, eq), load_embeddings(item.substr(eq + 1)));
      }
      if (common.out.empty()) throw UsageError("embed-export requires --out");
      export_embeddings_for_projection(sets, common.out, parse_embedding_format(export_format));
      std::size_t total = 0;
      for (const auto& s : sets) total += s.second.ids.size();
      out << "exported " << total << " records in " << sets.size() << " sets to " << common.out << "\n";
      return 0;
    } else if (sub == selftest) {
      const auto results = run_selftest();
      bool ok = true;
      std::string text;
      for (const auto& r : results) {
        ok = ok && r.passed;
        text += std::string(r.passed ? "PASS" : "FAIL") + "  " + r.name + "  (" + r.detail + ")\n";
      }
      emit(text, common, out);
      if (!ok) {
        err << "semeval: error: selftest_failed: one or more oracle checks failed\n";
        return 1;
      }
      return 0;
    }
    emit(render_report(report, format), common, out);
    return 0;
  } catch (const UsageError& e) {
    err << "semeval: error: usage_error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "semeval: error: " << e.category() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "semeval: error: internal: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("semeval");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace semeval
