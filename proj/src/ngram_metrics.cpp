#include "semeval/ngram_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "semeval/error.hpp"
#include "unicode.hpp"

namespace semeval {
namespace {

// Per-order n-gram multisets of one sentence.
using OrderCounts = std::vector<NgramCounts>;

OrderCounts order_counts(const TokenSequence& seq, int max_order) {
  OrderCounts out;
  out.reserve(static_cast<std::size_t>(max_order));
  for (int n = 1; n <= max_order; ++n) out.push_back(ngrams(seq, static_cast<std::size_t>(n)));
  return out;
}

// Clipped statistics of `hyp` against the references selected by `use_ref`.
template <typename UseRef>
BleuStats clipped_stats(const TokenSequence& hyp, const OrderCounts& hyp_counts,
                        std::span<const TokenSequence> refs, std::span<const OrderCounts> ref_counts,
                        int max_order, UseRef&& use_ref) {
  BleuStats st;
  st.matches.assign(static_cast<std::size_t>(max_order), 0);
  st.totals.assign(static_cast<std::size_t>(max_order), 0);
  st.hyp_length = hyp.size();
  st.empty_hypotheses = hyp.empty() ? 1 : 0;

  bool have_ref = false;
  std::size_t best = 0;
  for (std::size_t j = 0; j < refs.size(); ++j) {
    if (!use_ref(j)) continue;
    const auto len = refs[j].size();
    const auto diff = [&](std::size_t r) { return r > hyp.size() ? r - hyp.size() : hyp.size() - r; };
    if (!have_ref || diff(len) < diff(best) || (diff(len) == diff(best) && len < best)) best = len;
    have_ref = true;
  }
  st.ref_length = best;

  for (int k = 0; k < max_order; ++k) {
    const auto& hc = hyp_counts[static_cast<std::size_t>(k)];
    for (const auto& [gram, count] : hc) {
      std::size_t max_ref = 0;
      for (std::size_t j = 0; j < refs.size(); ++j) {
        if (!use_ref(j)) continue;
        const auto& rc = ref_counts[j][static_cast<std::size_t>(k)];
        if (auto it = rc.find(gram); it != rc.end()) max_ref = std::max(max_ref, it->second);
      }
      st.matches[static_cast<std::size_t>(k)] += std::min(count, max_ref);
      st.totals[static_cast<std::size_t>(k)] += count;
    }
  }
  return st;
}

void require_order(int order) {
  if (order < 1 || order > 4) throw InvalidArgument("BLEU order must be in [1, 4], got " + std::to_string(order));
}

}  // namespace

void BleuConfig::validate() const {
  require_order(max_order);
  if (smoothing == Smoothing::epsilon && !(epsilon > 0.0))
    throw InvalidArgument("epsilon smoothing requires epsilon > 0");
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  if (matches.size() < other.matches.size()) {
    matches.resize(other.matches.size(), 0);
    totals.resize(other.totals.size(), 0);
  }
  for (std::size_t k = 0; k < other.matches.size(); ++k) {
    matches[k] += other.matches[k];
    totals[k] += other.totals[k];
  }
  hyp_length += other.hyp_length;
  ref_length += other.ref_length;
  empty_hypotheses += other.empty_hypotheses;
  return *this;
}

std::size_t closest_reference_length(std::size_t hyp_length, std::span<const TokenSequence> refs) {
  if (refs.empty()) throw InvalidArgument("at least one reference is required");
  std::size_t best = refs.front().size();
  auto diff = [&](std::size_t r) { return r > hyp_length ? r - hyp_length : hyp_length - r; };
  for (const auto& ref : refs.subspan(1)) {
    const auto len = ref.size();
    if (diff(len) < diff(best) || (diff(len) == diff(best) && len < best)) best = len;
  }
  return best;
}

BleuStats bleu_stats(const TokenSequence& hyp, std::span<const TokenSequence> refs, int max_order) {
  require_order(max_order);
  if (refs.empty()) throw InvalidArgument("at least one reference is required");
  const auto hc = order_counts(hyp, max_order);
  std::vector<OrderCounts> rc;
  rc.reserve(refs.size());
  for (const auto& r : refs) rc.push_back(order_counts(r, max_order));
  return clipped_stats(hyp, hc, refs, rc, max_order, [](std::size_t) { return true; });
}

BleuScore bleu_from_stats(const BleuStats& stats, int order, const BleuConfig& cfg) {
  require_order(order);
  cfg.validate();
  if (stats.matches.size() < static_cast<std::size_t>(order))
    throw InvalidArgument("statistics were collected for a lower order than requested");

  BleuScore score;
  score.empty_hypothesis = stats.empty_hypotheses > 0;
  if (stats.hyp_length == 0) return score;

  const double c = static_cast<double>(stats.hyp_length);
  const double r = static_cast<double>(stats.ref_length);
  score.brevity_penalty = c > r ? 1.0 : std::exp(1.0 - r / c);

  double log_sum = 0.0;
  bool zero = false;
  for (int k = 0; k < order; ++k) {
    const auto m = stats.matches[static_cast<std::size_t>(k)];
    const auto t = stats.totals[static_cast<std::size_t>(k)];
    double p = 0.0;
    if (m > 0) {
      p = static_cast<double>(m) / static_cast<double>(t);
    } else if (cfg.smoothing == Smoothing::epsilon) {
      p = cfg.epsilon / static_cast<double>(std::max<std::size_t>(t, 1));
    }
    score.precisions.push_back(p);
    if (p == 0.0)
      zero = true;
    else
      log_sum += std::log(p);
  }
  if (zero) return score;
  score.value = score.brevity_penalty * std::exp(log_sum / order);
  // exp/log round trip may overshoot a perfect score by an ulp.
  score.value = std::min(score.value, 1.0);
  return score;
}

BleuScore sentence_bleu(const TokenSequence& hyp, std::span<const TokenSequence> refs, int order,
                        const BleuConfig& cfg) {
  return bleu_from_stats(bleu_stats(hyp, refs, order), order, cfg);
}

BleuScore corpus_bleu(std::span<const BleuPair> pairs, int order, const BleuConfig& cfg) {
  if (pairs.empty()) throw InvalidArgument("corpus BLEU needs at least one pair");
  BleuStats total;
  for (const auto& p : pairs) total += bleu_stats(p.hyp, p.refs, order);
  return bleu_from_stats(total, order, cfg);
}

double mean_sentence_bleu(std::span<const BleuPair> pairs, int order, const BleuConfig& cfg) {
  if (pairs.empty()) throw InvalidArgument("mean sentence BLEU needs at least one pair");
  double sum = 0.0;
  for (const auto& p : pairs) sum += sentence_bleu(p.hyp, p.refs, order, cfg).value;
  return sum / static_cast<double>(pairs.size());
}

BleuConfig default_self_bleu_config() {
  BleuConfig cfg;
  cfg.max_order = 4;
  cfg.smoothing = Smoothing::epsilon;
  cfg.epsilon = 1e-9;
  return cfg;
}

double self_bleu(std::span<const TokenSequence> hyps, const BleuConfig& cfg) {
  cfg.validate();
  if (hyps.size() < 2) throw InvalidArgument("Self-BLEU needs at least two hypotheses");
  std::vector<OrderCounts> counts;
  counts.reserve(hyps.size());
  for (const auto& h : hyps) counts.push_back(order_counts(h, cfg.max_order));
  double sum = 0.0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto st = clipped_stats(hyps[i], counts[i], hyps, counts, cfg.max_order,
                                  [i](std::size_t j) { return j != i; });
    sum += bleu_from_stats(st, cfg.max_order, cfg).value;
  }
  return sum / static_cast<double>(hyps.size());
}

double dist_n(std::span<const TokenSequence> hyps, std::size_t n, DistDenominator denominator) {
  if (hyps.empty()) throw InvalidArgument("Dist-n needs a non-empty corpus");
  std::set<Ngram> distinct;
  std::size_t tokens = 0, grams = 0;
  for (const auto& h : hyps) {
    tokens += h.size();
    for (const auto& [g, c] : ngrams(h, n)) {
      distinct.insert(g);
      grams += c;
    }
  }
  const auto denom = denominator == DistDenominator::tokens ? tokens : grams;
  if (denom == 0) throw InvalidArgument("Dist-" + std::to_string(n) + " denominator is zero");
  return static_cast<double>(distinct.size()) / static_cast<double>(denom);
}

HeadEntropy head_entropy(std::span<const TokenSequence> hyps) {
  HeadEntropy out;
  std::map<std::pair<std::string, std::string>, std::size_t> freq;
  for (const auto& h : hyps) {
    if (h.size() < 2) {
      ++out.skipped;
      continue;
    }
    ++freq[{h[0], h[1]}];
    ++out.used;
  }
  if (out.used == 0) throw InvalidArgument("Head Entropy: no hypothesis has two or more tokens");
  const double total = static_cast<double>(out.used);
  double h = 0.0;
  for (const auto& [bigram, count] : freq) {
    const double p = static_cast<double>(count) / total;
    h -= p * std::log2(p);
  }
  out.bits = h > 0.0 ? h : 0.0;
  return out;
}

StopwordList::StopwordList(std::set<std::string> words) : words_(words.begin(), words.end()) {}

StopwordList StopwordList::english() {
  static const char* const kWords[] = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're", "you've",
      "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself",
      "she", "she's", "her", "hers", "herself", "it", "it's", "its", "itself", "they", "them",
      "their", "theirs", "themselves", "what", "which", "who", "whom", "this", "that", "that'll",
      "these", "those", "am", "is", "are", "was", "were", "be", "been", "being", "have", "has",
      "had", "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
      "because", "as", "until", "while", "of", "at", "by", "for", "with", "about", "against",
      "between", "into", "through", "during", "before", "after", "above", "below", "to", "from",
      "up", "down", "in", "out", "on", "off", "over", "under", "again", "further", "then", "once",
      "here", "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
      "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than",
      "too", "very", "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now",
      "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't", "didn",
      "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven", "haven't", "isn",
      "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't",
      "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn",
      "wouldn't"};
  return StopwordList(std::set<std::string>(std::begin(kWords), std::end(kWords)));
}

StopwordList StopwordList::parse(std::string_view text) {
  std::set<std::string> words;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (const auto& tok : tokenize(line)) words.insert(lowercase(tok));
  }
  return StopwordList(std::move(words));
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open stop list " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto list = parse(ss.str());
  if (list.empty()) throw InvalidArgument("stop list " + path.string() + " is empty");
  return list;
}

bool StopwordList::contains(std::string_view lowercase_word) const {
  return words_.find(lowercase_word) != words_.end();
}

RecallCounts content_recall_counts(const TokenSequence& hyp, const TokenSequence& ref,
                                   const StopwordList& stop) {
  if (stop.empty()) throw InvalidArgument("Content Recall requires a non-empty stop list");
  std::unordered_set<std::string> hyp_words;
  for (const auto& t : hyp) hyp_words.insert(lowercase(t));
  RecallCounts rc;
  for (const auto& t : ref) {
    auto w = lowercase(t);
    if (stop.contains(w)) continue;
    ++rc.content_words;
    if (hyp_words.count(w)) ++rc.matched;
  }
  return rc;
}

double content_recall(const TokenSequence& hyp, const TokenSequence& ref, const StopwordList& stop) {
  const auto rc = content_recall_counts(hyp, ref, stop);
  return rc.content_words ? static_cast<double>(rc.matched) / static_cast<double>(rc.content_words) : 0.0;
}

double content_recall(std::span<const RecallPair> pairs, const StopwordList& stop, Aggregation aggregation) {
  std::size_t matched = 0, total = 0, sentences = 0;
  double macro_sum = 0.0;
  for (const auto& p : pairs) {
    const auto rc = content_recall_counts(p.hyp, p.ref, stop);
    matched += rc.matched;
    total += rc.content_words;
    if (rc.content_words) {
      macro_sum += static_cast<double>(rc.matched) / static_cast<double>(rc.content_words);
      ++sentences;
    }
  }
  if (aggregation == Aggregation::micro)
    return total ? static_cast<double>(matched) / static_cast<double>(total) : 0.0;
  return sentences ? macro_sum / static_cast<double>(sentences) : 0.0;
}

TokenSequence strip_prefixes(const TokenSequence& seq, std::span<const TokenSequence> prefixes) {
  std::size_t best = 0;
  for (const auto& p : prefixes) {
    if (p.empty() || p.size() > seq.size() || p.size() <= best) continue;
    if (std::equal(p.begin(), p.end(), seq.begin())) best = p.size();
  }
  if (best == 0) return seq;
  return TokenSequence{std::vector<std::string>(seq.tokens.begin() + static_cast<std::ptrdiff_t>(best),
                                                seq.tokens.end())};
}

std::vector<TokenSequence> parse_prefixes(std::string_view text) {
  std::vector<TokenSequence> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto seq = tokenize(line);
    if (!seq.empty()) out.push_back(std::move(seq));
  }
  return out;
}

std::vector<TokenSequence> load_prefixes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open prefix list " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto out = parse_prefixes(ss.str());
  if (out.empty()) throw InvalidArgument("prefix list " + path.string() + " is empty");
  return out;
}

std::vector<TokenSequence> default_prefixes() { return {tokenize("The movie"), tokenize("He was")}; }

}  // namespace semeval
