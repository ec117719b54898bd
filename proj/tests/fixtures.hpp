// Constructed corpora and systems shared by the protocol, CLI and acceptance tests.
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "semeval/corpus.hpp"
#include "semeval/embedding_io.hpp"
#include "semeval/semantic_space.hpp"

namespace fixture {

inline const std::vector<std::string> kNames{"Taylor", "Morgan", "Avery", "Jordan", "Casey", "Riley", "Quinn", "Harper"};
inline const std::vector<std::string> kCities{"Boston", "Chicago", "Denver", "Austin", "Seattle", "Portland", "Dallas"};
inline const std::vector<std::string> kFields{"law", "music", "physics", "painting", "economics", "medicine"};
inline const std::vector<std::string> kAdjectives{"clever", "tedious", "warm", "bleak", "vivid", "clumsy", "tender"};
inline const std::vector<std::string> kNouns{"dialogue", "pacing", "score", "cast", "script", "ending", "camera"};
inline const std::vector<std::string> kGibberish{"zorp", "quix", "blen", "frash", "mivo", "tralk", "dunse", "plox"};

inline const std::string& pick(std::mt19937_64& rng, const std::vector<std::string>& v) { return v[rng() % v.size()]; }

/// Biography and review sentences; odd ids are reviews. Every sample carries
/// two MTV variants that share the fixed openings.
inline std::vector<semeval::Sample> corpus(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<semeval::Sample> out;
  for (std::size_t i = 0; i < m; ++i) {
    semeval::Sample s;
    s.id = "s" + std::to_string(i);
    if (i % 2 == 0) {
      const auto& name = pick(rng, kNames);
      const auto& city = pick(rng, kCities);
      const auto& field = pick(rng, kFields);
      s.ground_truth = name + " was born in " + city + " and studied " + field + ".";
      s.mtv_variants = {"He was born in " + city + " and studied " + field + ".",
                        "He was a student of " + field + " from " + city + "."};
      s.attributes.topic = "biography";
      s.attributes.sentiment = "neutral";
    } else {
      const auto& a1 = pick(rng, kAdjectives);
      const auto& n1 = pick(rng, kNouns);
      const auto& a2 = pick(rng, kAdjectives);
      const auto& n2 = pick(rng, kNouns);
      s.ground_truth = "The film offers " + a1 + " " + n1 + " and " + a2 + " " + n2 + ".";
      s.mtv_variants = {"The movie offers " + a1 + " " + n1 + " and " + a2 + " " + n2 + ".",
                        "The movie is " + a1 + " with " + a2 + " " + n2 + "."};
      s.attributes.topic = "film";
      s.attributes.sentiment = rng() % 2 ? "positive" : "negative";
    }
    s.attributes.length = static_cast<long long>(semeval::tokenize(s.ground_truth).size());
    s.attributes.surprisal = 3.0 + double(rng() % 400) / 100.0;
    out.push_back(std::move(s));
  }
  return out;
}

inline semeval::HypothesisSet hypotheses(const std::string& name, semeval::Condition c) {
  semeval::HypothesisSet h;
  h.system_name = name;
  h.condition = c;
  return h;
}

inline void put(semeval::HypothesisSet& h, const std::string& id, std::string text) {
  h.hypotheses[id] = std::move(text);
  h.order.push_back(id);
}

/// Echoes every ground truth.
inline semeval::HypothesisSet identity_system(const std::vector<semeval::Sample>& c,
                                              semeval::Condition cond = semeval::Condition::real) {
  auto h = hypotheses("identity", cond);
  for (const auto& s : c) put(h, s.id, s.ground_truth);
  return h;
}

/// Emits the generic openings "He was" / "The movie" followed by loosely related words.
inline semeval::HypothesisSet template_system(const std::vector<semeval::Sample>& c, std::uint64_t seed,
                                              semeval::Condition cond = semeval::Condition::real) {
  std::mt19937_64 rng(seed);
  auto h = hypotheses("template", cond);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i % 2 == 0)
      put(h, c[i].id, "He was a member of the " + pick(rng, kFields) + " society.");
    else
      put(h, c[i].id, "The movie is " + pick(rng, kAdjectives) + " but the " + pick(rng, kNouns) + " fails.");
  }
  return h;
}

/// Output unrelated to any reference.
inline semeval::HypothesisSet gibberish_system(const std::vector<semeval::Sample>& c, std::uint64_t seed,
                                               semeval::Condition cond = semeval::Condition::noise) {
  std::mt19937_64 rng(seed);
  auto h = hypotheses("gibberish", cond);
  for (const auto& s : c) {
    std::string text;
    const auto len = 4 + rng() % 5;
    for (std::size_t k = 0; k < len; ++k) text += (k ? " " : "") + pick(rng, kGibberish);
    put(h, s.id, text + ".");
  }
  return h;
}

/// Corpus whose bigram overlap comes mostly from the shared openings.
struct PrefixCorpus {
  std::vector<semeval::Sample> corpus;
  semeval::HypothesisSet hyps;
};

inline PrefixCorpus prefix_heavy(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PrefixCorpus p;
  p.hyps = hypotheses("prefix-heavy", semeval::Condition::real);
  for (std::size_t i = 0; i < m; ++i) {
    semeval::Sample s;
    s.id = "p" + std::to_string(i);
    const bool movie = i % 2;
    const std::string open = movie ? "The movie" : "He was";
    s.ground_truth = open + " " + pick(rng, kAdjectives) + " " + pick(rng, kNouns) + " in " + pick(rng, kCities) + ".";
    const auto hyp = open + " " + pick(rng, kAdjectives) + " " + pick(rng, kFields) + " in " + pick(rng, kCities) + ".";
    put(p.hyps, s.id, hyp);
    p.corpus.push_back(std::move(s));
  }
  return p;
}

/// Deterministic bag-of-words sentence vector: each lowercased token hashes to
/// a fixed pseudo-random direction, and the sentence vector is their sum plus a
/// small per-sentence offset so no two rows coincide.
inline Eigen::VectorXd embed_text(const std::string& text, long dim = 16) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  auto hash = [](const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ULL;
    return h;
  };
  for (const auto& t : semeval::tokenize(text)) {
    std::mt19937_64 rng(hash(semeval::lowercase(t)));
    for (long k = 0; k < dim; ++k) v[k] += double(rng() >> 11) * 0x1.0p-53 - 0.5;
  }
  std::mt19937_64 rng(hash(text) ^ 0x9E3779B97F4A7C15ULL);
  for (long k = 0; k < dim; ++k) v[k] += 0.05 * (double(rng() >> 11) * 0x1.0p-53 - 0.5);
  return v;
}

inline semeval::EmbeddingMatrix embed_refs(const std::vector<semeval::Sample>& c, long dim = 16) {
  semeval::EmbeddingMatrix e;
  e.vectors.resize(static_cast<long>(c.size()), dim);
  for (std::size_t i = 0; i < c.size(); ++i) {
    e.ids.push_back(c[i].id);
    e.vectors.row(long(i)) = embed_text(c[i].ground_truth, dim).transpose();
  }
  return e;
}

inline semeval::EmbeddingMatrix embed_hyps(const semeval::HypothesisSet& h, long dim = 16) {
  semeval::EmbeddingMatrix e;
  e.vectors.resize(static_cast<long>(h.order.size()), dim);
  for (std::size_t i = 0; i < h.order.size(); ++i) {
    e.ids.push_back(h.order[i]);
    e.vectors.row(long(i)) = embed_text(h.at(h.order[i]), dim).transpose();
  }
  return e;
}

/// Writes corpus, hypothesis and embedding files for CLI runs into `dir`.
inline void write_cli_inputs(const std::filesystem::path& dir, std::size_t m = 40) {
  std::filesystem::create_directories(dir);
  const auto c = corpus(m, 17);
  semeval::write_corpus(dir / "corpus.jsonl", c);
  const auto real = template_system(c, 5);
  const auto noise = gibberish_system(c, 6);
  semeval::write_hypotheses(dir / "real.jsonl", real);
  semeval::write_hypotheses(dir / "noise.jsonl", noise);
  semeval::save_embeddings(dir / "refs.semb", embed_refs(c), semeval::EmbeddingFormat::binary);
  semeval::save_embeddings(dir / "real.semb", embed_hyps(real), semeval::EmbeddingFormat::binary);
  semeval::save_embeddings(dir / "noise_emb.jsonl", embed_hyps(noise), semeval::EmbeddingFormat::jsonl);
}

}  // namespace fixture
