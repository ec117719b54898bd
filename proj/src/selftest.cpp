#include "semeval/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "semeval/attention.hpp"
#include "semeval/losses.hpp"
#include "semeval/ngram_metrics.hpp"
#include "semeval/semantic_space.hpp"

namespace semeval {
namespace {

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; }

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = uniform(rng);
  return m;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// Clipped unigram precision by list scanning, independent of the n-gram maps.
double naive_bleu1(const TokenSequence& hyp, const TokenSequence& ref) {
  std::vector<bool> used(ref.size(), false);
  std::size_t hits = 0;
  for (const auto& t : hyp)
    for (std::size_t j = 0; j < ref.size(); ++j)
      if (!used[j] && ref[j] == t) {
        used[j] = true;
        ++hits;
        break;
      }
  const double c = static_cast<double>(hyp.size()), r = static_cast<double>(ref.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * static_cast<double>(hits) / c;
}

SelfTestResult reference_bleu() {
  struct Case {
    const char* hyp;
    const char* ref;
    double expected;
  };
  const Case cases[] = {
      {"He was also a member of the Royal Family.", "He also was awarded the Presidential Medal of Freedom.", 0.556},
      {"The movie is surprisingly romanticized.", "The cumulative effect of the movie is repulsive and depressing.", 0.221},
      {"He was a follower of Ronald Reagan.", "Taylor was born with dual British and American citizenship.", 0.107},
      {"During his career, he married Joyce Halverson in 1951.", "He is married to singer Chynna Phillips.", 0.111},
  };
  for (const auto& c : cases) {
    const auto ref = tokenize(c.ref);
    const double got = sentence_bleu(tokenize(c.hyp), std::span(&ref, 1), 1).value;
    const double naive = naive_bleu1(tokenize(c.hyp), ref);
    if (std::abs(got - c.expected) > 1e-3 || std::abs(got - naive) > 1e-12)
      return {"reference BLEU-1 vectors", false, std::string(c.hyp) + fmt(": got %.6f expected %.3f", got, c.expected)};
  }
  return {"reference BLEU-1 vectors", true, "4/4 within 0.001"};
}

SelfTestResult bleu_bruteforce() {
  std::mt19937_64 rng(11);
  const char* vocab[] = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 200; ++trial) {
    TokenSequence hyp, ref;
    const auto hl = 1 + rng() % 8, rl = 1 + rng() % 8;
    for (std::size_t i = 0; i < hl; ++i) hyp.tokens.push_back(vocab[rng() % 6]);
    for (std::size_t i = 0; i < rl; ++i) ref.tokens.push_back(vocab[rng() % 6]);
    const double got = sentence_bleu(hyp, std::span(&ref, 1), 1).value;
    if (std::abs(got - naive_bleu1(hyp, ref)) > 1e-12)
      return {"BLEU-1 vs. list-scan oracle", false, hyp.joined() + " | " + ref.joined()};
  }
  return {"BLEU-1 vs. list-scan oracle", true, "200 random pairs"};
}

SelfTestResult frechet_identities() {
  std::mt19937_64 rng(5);
  for (int d : {2, 8, 64}) {
    GaussianSummary<double> a{Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d), 10};
    GaussianSummary<double> b = a;
    b.mean = random_matrix(rng, d, 1);
    const double fd = frechet_distance(a, b);
    if (std::abs(fd - b.mean.squaredNorm()) > 1e-9)
      return {"Frechet analytic cases", false, fmt("identity covariances, d=%g: error %.3g", d, fd - b.mean.squaredNorm())};
  }
  Eigen::VectorXd da(3), db(3);
  da << 1.0, 4.0, 0.25;
  db << 9.0, 1.0, 0.5;
  GaussianSummary<double> a{Eigen::VectorXd::Zero(3), da.asDiagonal(), 10};
  GaussianSummary<double> b{Eigen::VectorXd::Zero(3), db.asDiagonal(), 10};
  const double expected = (da.cwiseSqrt() - db.cwiseSqrt()).squaredNorm();
  if (std::abs(frechet_distance(a, b) - expected) > 1e-9) return {"Frechet analytic cases", false, "diagonal case"};
  if (std::abs(frechet_distance(a, a)) > 1e-9) return {"Frechet analytic cases", false, "FD(G, G) != 0"};
  return {"Frechet analytic cases", true, "shift, diagonal and identity cases"};
}

SelfTestResult sqrtm_reconstruction() {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng() % 32);
    const Eigen::MatrixXd c = random_matrix(rng, n, n);
    const Eigen::MatrixXd b = c.transpose() * c;
    const Eigen::MatrixXd s = sqrtm_psd(b);
    worst = std::max(worst, (s * s - b).norm() / b.norm());
  }
  return {"sqrtm_psd reconstruction", worst < 1e-10, fmt("worst relative error %.3g", worst)};
}

SelfTestResult attention_checks() {
  std::mt19937_64 rng(13);
  const Eigen::Index t = 3, l = 4, d = 5, dk = 2;
  NeuralMemory<double> mem{random_matrix(rng, d, 1), random_matrix(rng, l, d)};
  AttentionParams<double> p{random_matrix(rng, d, d), random_matrix(rng, d, dk), random_matrix(rng, d, dk),
                            random_matrix(rng, d, dk)};
  const Eigen::MatrixXd text = random_matrix(rng, t, d);
  const Eigen::MatrixXd up = random_matrix(rng, t, dk);

  const auto out = qkv_cross_attention(text, mem, p);
  if ((out.weights.rowwise().sum().array() - 1.0).abs().maxCoeff() > 1e-12)
    return {"attention forward/gradient", false, "attention rows do not sum to 1"};

  const auto g = attention_input_gradient(text, mem, p, up);
  const double h = 1e-5;
  auto objective = [&](const Eigen::MatrixXd& tx, const NeuralMemory<double>& m) {
    return qkv_cross_attention(tx, m, p).output.cwiseProduct(up).sum();
  };
  double worst = 0.0;
  auto compare = [&](double analytic, double numeric) {
    worst = std::max(worst, std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric)));
  };
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      Eigen::MatrixXd plus = text, minus = text;
      plus(i, j) += h;
      minus(i, j) -= h;
      compare(g.d_text(i, j), (objective(plus, mem) - objective(minus, mem)) / (2 * h));
    }
  for (Eigen::Index i = 0; i < l; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      auto plus = mem, minus = mem;
      plus.sequence(i, j) += h;
      minus.sequence(i, j) -= h;
      compare(g.d_sequence(i, j), (objective(text, plus) - objective(text, minus)) / (2 * h));
    }
  return {"attention forward/gradient", worst < 1e-4, fmt("max relative gradient error %.3g", worst)};
}

SelfTestResult loss_composition() {
  const double v = stage1_objective(DetailedLossTerms{1, 1, 1, 1, 1, 1, 1}, PerTermLossWeights::stage1_defaults());
  const double uniform4[] = {0.25, 0.25, 0.25, 0.25};
  const double ce = cross_entropy_loss(uniform4, 2);
  const bool ok = v == 3.5 && std::abs(ce - std::log(4.0)) < 1e-12;
  return {"loss composition", ok, fmt("stage-1 weights with unit terms = %.17g, CE(uniform 4) = %.15f", v, ce)};
}

SelfTestResult retrieval_perfect() {
  std::mt19937_64 rng(17);
  EmbeddingMatrix e;
  e.vectors = random_matrix(rng, 30, 8);
  for (int i = 0; i < 30; ++i) e.ids.push_back("s" + std::to_string(i));
  for (int n : {2, 4, 10, 24}) {
    const auto r = nway_retrieval_accuracy(e, e, {n, 5, 1, 1});
    if (r.mean_accuracy != 1.0) return {"retrieval perfect alignment", false, fmt("N=%g accuracy %.4f", n, r.mean_accuracy)};
  }
  return {"retrieval perfect alignment", true, "accuracy 1.0 at N = 2, 4, 10, 24"};
}

}  // namespace

std::vector<SelfTestResult> run_selftest() {
  const std::function<SelfTestResult()> checks[] = {reference_bleu,    bleu_bruteforce,  frechet_identities,
                                                    sqrtm_reconstruction, attention_checks, loss_composition,
                                                    retrieval_perfect};
  std::vector<SelfTestResult> results;
  for (const auto& check : checks) {
    try {
      results.push_back(check());
    } catch (const std::exception& e) {
      results.push_back({"(exception)", false, e.what()});
    }
  }
  return results;
}

}  // namespace semeval
