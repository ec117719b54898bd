#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "semeval/error.hpp"

namespace semeval {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Sentence embeddings, one row per id. Stored in double regardless of the
/// on-disk precision.
struct EmbeddingMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd vectors;

  Eigen::Index rows() const noexcept { return vectors.rows(); }
  Eigen::Index dim() const noexcept { return vectors.cols(); }
  bool empty() const noexcept { return ids.empty(); }

  /// Row index of `id`; throws InvalidArgument when absent.
  Eigen::Index index_of(const std::string& id) const;
  /// Rows reordered/selected to follow `order`.
  EmbeddingMatrix select(const std::vector<std::string>& order) const;
  /// Copy with every row scaled to unit L2 norm.
  EmbeddingMatrix normalized() const;
  /// Throws InvalidArgument on |ids| != rows, d < 1 or non-finite entries.
  void validate() const;
};

template <typename Scalar>
struct GaussianSummary {
  Vector<Scalar> mean;
  Matrix<Scalar> covariance;
  std::size_t count = 0;

  Eigen::Index dim() const noexcept { return mean.size(); }
};

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) throw InvalidArgument("cosine_similarity: dimension mismatch");
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (!(na > Scalar(0)) || !(nb > Scalar(0))) throw InvalidArgument("cosine_similarity: zero-norm vector");
  const Scalar c = a.cwiseProduct(b).sum() / (na * nb);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

/// Column mean and unbiased (n-1) covariance of the rows, symmetrized.
template <typename Derived>
GaussianSummary<typename Derived::Scalar> fit_gaussian(const Eigen::MatrixBase<Derived>& rows) {
  using Scalar = typename Derived::Scalar;
  const auto n = rows.rows();
  if (n < 2) throw InvalidArgument("fit_gaussian needs at least two rows, got " + std::to_string(n));
  if (!rows.allFinite()) throw NumericalError("fit_gaussian: non-finite entries");
  GaussianSummary<Scalar> g;
  g.count = static_cast<std::size_t>(n);
  g.mean = rows.colwise().mean().transpose();
  const Matrix<Scalar> centered = rows.rowwise() - g.mean.transpose();
  Matrix<Scalar> cov = (centered.transpose() * centered) / Scalar(n - 1);
  g.covariance = (cov + cov.transpose()) / Scalar(2);
  return g;
}

inline GaussianSummary<double> fit_gaussian(const EmbeddingMatrix& e) { return fit_gaussian(e.vectors); }

/// Relative eigenvalue floor: eigenvalues below this fraction of the largest
/// are treated as zero.
inline constexpr double kPsdClampRelative = 1e-10;

/// Principal square root of a symmetric positive semidefinite matrix via
/// A = U diag(l) U^T -> U diag(sqrt(max(l, 0))) U^T.
template <typename Derived>
Matrix<typename Derived::Scalar> sqrtm_psd(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw InvalidArgument("sqrtm_psd: matrix is not square");
  if (a.hasNaN()) throw NumericalError("sqrtm_psd: NaN entries");
  if (!a.allFinite()) throw NumericalError("sqrtm_psd: infinite entries");
  if (a.size() == 0) return Matrix<Scalar>(0, 0);

  const Scalar scale = std::max(Scalar(1), a.cwiseAbs().maxCoeff());
  const Scalar asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  const Scalar sym_tol = std::is_same_v<Scalar, float> ? Scalar(1e-5) : Scalar(1e-9);
  if (asym > sym_tol * scale)
    throw NumericalError("sqrtm_psd: matrix is not symmetric (max asymmetry " + std::to_string(double(asym)) + ")");

  const Matrix<Scalar> sym = (a + a.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym);
  if (es.info() != Eigen::Success) throw NumericalError("sqrtm_psd: eigendecomposition failed");

  Vector<Scalar> lambda = es.eigenvalues();
  const Scalar top = lambda.maxCoeff();
  if (lambda.minCoeff() < -Scalar(1e-10) * std::max(Scalar(1), top))
    throw NumericalError("sqrtm_psd: matrix is indefinite (min eigenvalue " + std::to_string(double(lambda.minCoeff())) + ")");
  const Scalar floor = Scalar(kPsdClampRelative) * std::max(top, Scalar(0));
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    lambda(i) = lambda(i) > floor ? std::sqrt(lambda(i)) : Scalar(0);

  const auto& u = es.eigenvectors();
  Matrix<Scalar> root = u * lambda.asDiagonal() * u.transpose();
  return (root + root.transpose()) / Scalar(2);
}

/// ||mu_r - mu_g||^2 + Tr(S_r) + Tr(S_g) - 2 Tr(sqrt(R S_g R)), R = sqrt(S_r).
/// The symmetric inner product has the same trace as sqrt(S_r S_g).
template <typename Scalar>
Scalar frechet_distance(const GaussianSummary<Scalar>& r, const GaussianSummary<Scalar>& g) {
  if (r.dim() != g.dim() || r.covariance.rows() != r.dim() || g.covariance.rows() != g.dim())
    throw InvalidArgument("frechet_distance: dimension mismatch (" + std::to_string(r.dim()) + " vs " +
                          std::to_string(g.dim()) + ")");
  const Scalar mean_term = (r.mean - g.mean).squaredNorm();
  const Matrix<Scalar> root_r = sqrtm_psd(r.covariance);
  Matrix<Scalar> inner = root_r * g.covariance * root_r;
  inner = (inner + inner.transpose()) / Scalar(2);
  const Scalar cross = sqrtm_psd(inner).trace();
  const Scalar fd = mean_term + r.covariance.trace() + g.covariance.trace() - Scalar(2) * cross;
  return std::max(fd, Scalar(0));
}

struct RetrievalConfig {
  int n_way = 2;
  int runs = 10;
  std::uint64_t seed = 0x5EED5EEDULL;
  /// Worker threads for independent runs; 0 = hardware concurrency.
  unsigned threads = 1;
};

struct RetrievalResult {
  double mean_accuracy = 0.0;
  std::vector<double> per_run;
  /// Sample standard deviation across runs (0 for a single run).
  double std = 0.0;
};

/// Deterministic stream for the negatives of one query in one run.
std::uint64_t retrieval_stream_key(std::uint64_t seed, std::uint64_t run, std::uint64_t query) noexcept;

/// `count` distinct integers from [0, population) excluding `exclude`, drawn
/// uniformly (Floyd's algorithm) from the stream `key`.
std::vector<std::size_t> sample_negatives(std::uint64_t key, std::size_t population, std::size_t exclude,
                                          std::size_t count);

/// Pairwise cosine similarity, queries x candidates.
Eigen::MatrixXd cosine_similarity_matrix(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& candidates);

/// N-way retrieval: query i succeeds iff its own candidate scores strictly above
/// all N-1 sampled negatives.
RetrievalResult nway_retrieval_accuracy(const EmbeddingMatrix& queries, const EmbeddingMatrix& candidates,
                                        const RetrievalConfig& cfg);

}  // namespace semeval
