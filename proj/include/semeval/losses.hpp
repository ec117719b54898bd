#pragma once

#include <cstddef>
#include <span>

namespace semeval {

/// -log(p[target]) with p floored at 1e-12. `probs` must be a probability
/// vector (non-negative, sums to 1 within 1e-9).
double cross_entropy_loss(std::span<const double> probs, std::size_t target);

/// Mean squared difference of equal-length, non-empty vectors.
double mse_loss(std::span<const double> pred, std::span<const double> target);

/// Scalar loss values entering the Stage-1 objective.
struct LossTerms {
  double align = 0.0;
  double recon = 0.0;
  double stm = 0.0;
  double tpc = 0.0;
  double len = 0.0;
  double spr = 0.0;
};

/// Grouped weights: lambda_cls scales stm + tpc, lambda_reg scales len + spr.
struct LossWeights {
  double align = 1.0;
  double recon = 1.0;
  double cls = 1.0;
  double reg = 1.0;
};

/// Stage-1 objective with grouped weights.
double stage1_objective(const LossTerms& terms, const LossWeights& w);

/// Same terms with the alignment loss split into its two parts.
struct DetailedLossTerms {
  double contrastive = 0.0;
  double commitment = 0.0;
  double recon = 0.0;
  double stm = 0.0;
  double tpc = 0.0;
  double len = 0.0;
  double spr = 0.0;
};

/// One weight per loss component.
struct PerTermLossWeights {
  double contrastive = 0.0;
  double commitment = 0.0;
  double recon = 0.0;
  double stm = 0.0;
  double tpc = 0.0;
  double len = 0.0;
  double spr = 0.0;

  /// Representation-learning stage: 0.5 / 0.7 / 0.5 / 0.3 / 0.3 / 0.9 / 0.3.
  static PerTermLossWeights stage1_defaults();
  /// Generative tuning: alignment disabled, recon 1.5, attribute heads 0.25.
  static PerTermLossWeights e2e_defaults();
};

double stage1_objective(const DetailedLossTerms& terms, const PerTermLossWeights& w);

}  // namespace semeval
