#include "semeval/losses.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

#include "semeval/error.hpp"

namespace semeval {
namespace {

void check_terms(std::initializer_list<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("loss term is not finite");
    if (v < 0.0) throw InvalidArgument("loss term is negative: " + std::to_string(v));
  }
}

void check_weights(std::initializer_list<double> values) {
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("loss weights must be finite and >= 0");
}

// Neumaier-compensated sum so decimal weights add up without drift
// (0.5 + 0.7 + 0.5 + 0.3 + 0.3 + 0.9 + 0.3 is exactly 3.5).
double compensated_sum(std::initializer_list<double> values) {
  double sum = 0.0, c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  return sum + c;
}

}  // namespace

double cross_entropy_loss(std::span<const double> probs, std::size_t target) {
  if (probs.empty()) throw InvalidArgument("cross_entropy_loss: empty probability vector");
  if (target >= probs.size())
    throw InvalidArgument("cross_entropy_loss: target " + std::to_string(target) + " out of range");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("cross_entropy_loss: invalid probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("cross_entropy_loss: probabilities sum to " + std::to_string(sum));
  return -std::log(std::max(probs[target], 1e-12));
}

double mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw InvalidArgument("mse_loss: length mismatch");
  if (pred.empty()) throw InvalidArgument("mse_loss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = target[i] - pred[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

double stage1_objective(const LossTerms& t, const LossWeights& w) {
  check_terms({t.align, t.recon, t.stm, t.tpc, t.len, t.spr});
  check_weights({w.align, w.recon, w.cls, w.reg});
  return compensated_sum({w.align * t.align, w.recon * t.recon, w.cls * t.stm, w.cls * t.tpc, w.reg * t.len,
                          w.reg * t.spr});
}

PerTermLossWeights PerTermLossWeights::stage1_defaults() { return {0.5, 0.7, 0.5, 0.3, 0.3, 0.9, 0.3}; }

PerTermLossWeights PerTermLossWeights::e2e_defaults() { return {0.0, 0.0, 1.5, 0.25, 0.25, 0.25, 0.25}; }

double stage1_objective(const DetailedLossTerms& t, const PerTermLossWeights& w) {
  check_terms({t.contrastive, t.commitment, t.recon, t.stm, t.tpc, t.len, t.spr});
  check_weights({w.contrastive, w.commitment, w.recon, w.stm, w.tpc, w.len, w.spr});
  return compensated_sum({w.contrastive * t.contrastive, w.commitment * t.commitment, w.recon * t.recon,
                          w.stm * t.stm, w.tpc * t.tpc, w.len * t.len, w.spr * t.spr});
}

}  // namespace semeval
