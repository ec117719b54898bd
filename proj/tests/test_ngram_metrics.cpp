#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "semeval/error.hpp"
#include "semeval/ngram_metrics.hpp"

using namespace semeval;

namespace {

TokenSequence seq(const oracle::Sentence& s) { return TokenSequence{s}; }

std::vector<TokenSequence> seqs(const std::vector<oracle::Sentence>& v) {
  std::vector<TokenSequence> out;
  for (const auto& s : v) out.push_back(seq(s));
  return out;
}

double bleu_text(std::string_view hyp, std::string_view ref, int order) {
  const std::vector<TokenSequence> refs{tokenize(ref)};
  return sentence_bleu(tokenize(hyp), refs, order).value;
}

}  // namespace

TEST_CASE("reference BLEU-1 vectors") {
  CHECK(std::abs(bleu_text("He was also a member of the Royal Family.",
                           "He also was awarded the Presidential Medal of Freedom.", 1) - 0.556) < 1e-3);
  CHECK(std::abs(bleu_text("The movie is surprisingly romanticized.",
                           "The cumulative effect of the movie is repulsive and depressing.", 1) - 0.221) < 1e-3);
  CHECK(std::abs(bleu_text("He was a follower of Ronald Reagan.",
                           "Taylor was born with dual British and American citizenship.", 1) - 0.107) < 1e-3);
  CHECK(std::abs(bleu_text("He had seven children with his wife.", "He is married to singer Chynna Phillips.", 1) -
                 0.143) < 1e-3);
  CHECK(std::abs(bleu_text("During his career, he married Joyce Halverson in 1951.",
                           "He is married to singer Chynna Phillips.", 1) - 0.111) < 1e-3);
}

TEST_CASE("hand-computed BLEU") {
  // identical sentences
  CHECK(bleu_text("a b c d", "a b c d", 4) == 1.0);
  // clipping: "the the the" vs "the cat" -> p1 = 1/3, BP = 1
  CHECK(bleu_text("the the the", "the cat", 1) == doctest::Approx(1.0 / 3));
  // short hypothesis gets the brevity penalty
  CHECK(bleu_text("a b", "a b c d", 1) == doctest::Approx(std::exp(1.0 - 2.0)));
  // no bigram match and no smoothing -> 0
  CHECK(bleu_text("a b", "b a", 2) == 0.0);
  // empty hypothesis
  const std::vector<TokenSequence> refs{tokenize("x y")};
  const auto empty = sentence_bleu(TokenSequence{}, refs, 2);
  CHECK(empty.value == 0.0);
  CHECK(empty.empty_hypothesis);
}

TEST_CASE("closest reference length prefers the shorter on ties") {
  const std::vector<TokenSequence> refs{tokenize("a b"), tokenize("a b c d"), tokenize("a")};
  CHECK(closest_reference_length(3, refs) == 2);
  CHECK(closest_reference_length(4, refs) == 4);
  CHECK(closest_reference_length(0, refs) == 1);
}

TEST_CASE("epsilon smoothing") {
  BleuConfig cfg;
  cfg.smoothing = Smoothing::epsilon;
  cfg.epsilon = 0.1;
  const std::vector<TokenSequence> refs{tokenize("a b c")};
  // p1 = 3/3, p2 = 0 matches of 2 -> 0.1 / 2
  const auto s = sentence_bleu(tokenize("a c b"), refs, 2, cfg);
  CHECK(s.precisions[0] == doctest::Approx(1.0));
  CHECK(s.precisions[1] == doctest::Approx(0.05));
  CHECK(s.value == doctest::Approx(std::sqrt(0.05)));
  cfg.epsilon = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  BleuConfig bad;
  bad.max_order = 5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("BLEU, Self-BLEU, Dist, Head Entropy and recall match brute force") {
  std::mt19937_64 rng(20240601);
  const auto stop = StopwordList(std::set<std::string>{"w0", "w1", "w2"});
  for (int corpus = 0; corpus < 200; ++corpus) {
    const auto m = 2 + rng() % 9;
    std::vector<oracle::Sentence> hyps, refs;
    std::vector<std::vector<oracle::Sentence>> multi;
    for (std::size_t i = 0; i < m; ++i) {
      hyps.push_back(oracle::random_sentence(rng, 12, 20));
      oracle::Sentence r;
      do r = oracle::random_sentence(rng, 12, 20);
      while (r.empty());
      refs.push_back(r);
      multi.push_back({r});
      const auto extra = rng() % 3;
      for (std::size_t k = 0; k < extra; ++k) multi.back().push_back(oracle::random_sentence(rng, 12, 20));
    }
    std::vector<std::vector<oracle::Sentence>> single_refs;
    for (const auto& r : refs) single_refs.push_back({r});
    std::vector<BleuPair> single_pairs, multi_pairs;
    for (std::size_t i = 0; i < m; ++i) {
      single_pairs.push_back({seq(hyps[i]), {seq(refs[i])}});
      multi_pairs.push_back({seq(hyps[i]), seqs(multi[i])});
    }
    for (int order = 1; order <= 4; ++order) {
      CHECK(std::abs(corpus_bleu(single_pairs, order).value - oracle::corpus_bleu(hyps, single_refs, order)) <= 1e-12);
      CHECK(std::abs(corpus_bleu(multi_pairs, order).value - oracle::corpus_bleu(hyps, multi, order)) <= 1e-12);
      for (std::size_t i = 0; i < m; ++i) {
        const auto got = sentence_bleu(seq(hyps[i]), multi_pairs[i].refs, order).value;
        CHECK(std::abs(got - oracle::sentence_bleu(hyps[i], multi[i], order)) <= 1e-12);
        BleuConfig eps;
        eps.smoothing = Smoothing::epsilon;
        const auto got_eps = sentence_bleu(seq(hyps[i]), multi_pairs[i].refs, order, eps).value;
        CHECK(std::abs(got_eps - oracle::sentence_bleu(hyps[i], multi[i], order, 1e-9)) <= 1e-12);
      }
    }
    const auto hs = seqs(hyps);
    CHECK(std::abs(self_bleu(hs) - oracle::self_bleu(hyps, 4, 1e-9)) <= 1e-12);
    std::size_t tokens = 0;
    for (const auto& h : hyps) tokens += h.size();
    for (std::size_t n = 1; n <= 2; ++n) {
      if (tokens > 0) CHECK(std::abs(dist_n(hs, n) - oracle::dist(hyps, n, true)) <= 1e-12);
      bool has_grams = false;
      for (const auto& h : hyps) has_grams = has_grams || h.size() >= n;
      if (has_grams)
        CHECK(std::abs(dist_n(hs, n, DistDenominator::ngrams) - oracle::dist(hyps, n, false)) <= 1e-12);
    }
    bool any_head = false;
    for (const auto& h : hyps) any_head = any_head || h.size() >= 2;
    if (any_head) CHECK(std::abs(head_entropy(hs).bits - oracle::head_entropy_bits(hyps)) <= 1e-12);

    std::size_t om = 0, oc = 0;
    double macro = 0;
    std::size_t sentences = 0;
    std::vector<RecallPair> rp;
    for (std::size_t i = 0; i < m; ++i) {
      const auto [mm, cc] = oracle::recall_counts(hyps[i], refs[i], {"w0", "w1", "w2"});
      const auto rc = content_recall_counts(seq(hyps[i]), seq(refs[i]), stop);
      CHECK(rc.matched == mm);
      CHECK(rc.content_words == cc);
      om += mm;
      oc += cc;
      if (cc) {
        macro += double(mm) / double(cc);
        ++sentences;
      }
      rp.push_back({seq(hyps[i]), seq(refs[i])});
    }
    CHECK(std::abs(content_recall(rp, stop) - (oc ? double(om) / double(oc) : 0.0)) <= 1e-12);
    CHECK(std::abs(content_recall(rp, stop, Aggregation::macro) - (sentences ? macro / double(sentences) : 0.0)) <=
          1e-12);
  }
}

TEST_CASE("corpus BLEU is invariant to pair order") {
  std::mt19937_64 rng(11);
  std::vector<BleuPair> pairs;
  for (int i = 0; i < 8; ++i)
    pairs.push_back({seq(oracle::random_sentence(rng, 10, 6)), {seq(oracle::random_sentence(rng, 10, 6))}});
  pairs[0].refs[0].tokens.push_back("w1");
  const auto before = corpus_bleu(pairs, 2).value;
  std::shuffle(pairs.begin(), pairs.end(), rng);
  CHECK(corpus_bleu(pairs, 2).value == before);
}

TEST_CASE("adding references never lowers clipped matches") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto hyp = seq(oracle::random_sentence(rng, 10, 8));
    std::vector<TokenSequence> refs{seq(oracle::random_sentence(rng, 10, 8))};
    auto before = bleu_stats(hyp, refs, 4);
    refs.push_back(seq(oracle::random_sentence(rng, 10, 8)));
    auto after = bleu_stats(hyp, refs, 4);
    for (int k = 0; k < 4; ++k) CHECK(after.matches[k] >= before.matches[k]);
  }
}

TEST_CASE("Self-BLEU, Dist and Head Entropy edge cases") {
  const std::vector<TokenSequence> same{tokenize("a b c d e"), tokenize("a b c d e")};
  CHECK(self_bleu(same) == doctest::Approx(1.0));
  CHECK_THROWS_AS(self_bleu(std::vector<TokenSequence>{tokenize("a")}), InvalidArgument);
  CHECK(dist_n(same, 1) == doctest::Approx(0.5));
  CHECK(dist_n(same, 2, DistDenominator::ngrams) == doctest::Approx(0.5));
  CHECK_THROWS_AS(dist_n(std::vector<TokenSequence>{}, 1), InvalidArgument);
  CHECK(head_entropy(same).bits == 0.0);
  const std::vector<TokenSequence> four{tokenize("a b"), tokenize("c d"), tokenize("e f"), tokenize("g h"),
                                        tokenize("z")};
  const auto he = head_entropy(four);
  CHECK(he.bits == doctest::Approx(2.0));
  CHECK(he.used == 4);
  CHECK(he.skipped == 1);
}

TEST_CASE("content recall") {
  const auto stop = StopwordList::english();
  CHECK(stop.size() == 179);
  CHECK(stop.contains("the"));
  CHECK_FALSE(stop.contains("movie"));
  // reference content words: movie, surprisingly, romanticized; hypothesis has "Movie"
  CHECK(content_recall(tokenize("A Movie"), tokenize("The movie is surprisingly romanticized."), stop) ==
        doctest::Approx(1.0 / 3));
  // repeated reference words count per occurrence
  const auto rc = content_recall_counts(tokenize("dog"), tokenize("dog dog cat"), stop);
  CHECK(rc.matched == 2);
  CHECK(rc.content_words == 3);
  CHECK(content_recall(tokenize("x"), tokenize("the a an"), stop) == 0.0);
  CHECK_THROWS_AS(content_recall_counts(tokenize("x"), tokenize("y"), StopwordList{}), InvalidArgument);
  const auto parsed = StopwordList::parse("# comment\nThe\nand\n\n");
  CHECK(parsed.size() == 2);
  CHECK(parsed.contains("the"));
}

TEST_CASE("prefix stripping") {
  const auto prefixes = default_prefixes();
  CHECK(strip_prefixes(tokenize("The movie is fun."), prefixes) == tokenize("is fun"));
  CHECK(strip_prefixes(tokenize("He was born."), prefixes) == tokenize("born"));
  CHECK(strip_prefixes(tokenize("the movie is fun"), prefixes) == tokenize("the movie is fun"));
  CHECK(strip_prefixes(tokenize("The movie"), prefixes).empty());
  // longest match wins, applied once
  const auto p = parse_prefixes("# prefixes\nHe\nHe was\n");
  CHECK(p.size() == 2);
  CHECK(strip_prefixes(tokenize("He was He was here"), p) == tokenize("He was here"));
}

TEST_CASE("BLEU bounds and the order relationship") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const auto h = seq(oracle::random_sentence(rng, 10, 4));
    const std::vector<TokenSequence> refs{seq(oracle::random_sentence(rng, 10, 4))};
    for (int n = 1; n <= 4; ++n) {
      const auto v = sentence_bleu(h, refs, n).value;
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    if (refs[0].size() >= 4) CHECK(sentence_bleu(refs[0], refs, 4).value == 1.0);
  }
  // Higher orders can score above lower ones: unigram clipping hurts more here.
  const std::vector<TokenSequence> refs{tokenize("b b b b a b")};
  const auto h = tokenize("a b b b a");
  CHECK(sentence_bleu(h, refs, 1).value == doctest::Approx(0.6549846024623855));
  CHECK(sentence_bleu(h, refs, 2).value == doctest::Approx(0.7322950476607851));
  // A permutation of the reference is perfect at order 1 only.
  const std::vector<TokenSequence> ab{tokenize("a b c")};
  CHECK(sentence_bleu(tokenize("c b a"), ab, 1).value == 1.0);
  CHECK(sentence_bleu(tokenize("c b a"), ab, 2).value == 0.0);
}
