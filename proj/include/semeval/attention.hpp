#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "semeval/error.hpp"
#include "semeval/semantic_space.hpp"

namespace semeval {

/// Neural key/value memory: a pooled global vector plus L sequence rows.
template <typename Scalar>
struct NeuralMemory {
  Vector<Scalar> global;     // d_model
  Matrix<Scalar> sequence;   // L x d_model

  /// [global; sequence], (L+1) x d_model.
  Matrix<Scalar> stacked() const {
    Matrix<Scalar> m(sequence.rows() + 1, sequence.cols());
    m.row(0) = global.transpose();
    m.bottomRows(sequence.rows()) = sequence;
    return m;
  }
};

template <typename Scalar>
struct AttentionParams {
  Matrix<Scalar> w_proj;  // d_model x d_model
  Matrix<Scalar> w_q;     // d_model x d_k
  Matrix<Scalar> w_k;     // d_model x d_k
  Matrix<Scalar> w_v;     // d_model x d_k

  Eigen::Index d_model() const noexcept { return w_proj.rows(); }
  Eigen::Index d_k() const noexcept { return w_q.cols(); }
};

template <typename Scalar>
struct AttentionOutput {
  Matrix<Scalar> output;   // T x d_k
  Matrix<Scalar> weights;  // T x (L+1), rows on the simplex
};

template <typename Scalar>
struct AttentionGradients {
  Matrix<Scalar> d_text;      // T x d_model
  Matrix<Scalar> d_sequence;  // L x d_model
  Vector<Scalar> d_global;    // d_model
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* stage) {
  if (!m.allFinite()) throw NumericalError(std::string("non-finite values at stage: ") + stage);
}

template <typename Scalar>
void check_shapes(const Matrix<Scalar>& text, const NeuralMemory<Scalar>& mem, const AttentionParams<Scalar>& p) {
  const auto d = p.d_model();
  auto fail = [](const std::string& what) { throw InvalidArgument("qkv_cross_attention: " + what); };
  if (p.w_proj.cols() != d) fail("W_proj must be d_model x d_model");
  if (p.d_k() < 1) fail("d_k must be >= 1");
  if (p.w_q.rows() != d || p.w_k.rows() != d || p.w_v.rows() != d) fail("W_Q/W_K/W_V must have d_model rows");
  if (p.w_k.cols() != p.d_k() || p.w_v.cols() != p.d_k()) fail("W_Q/W_K/W_V must share d_k columns");
  if (text.cols() != d) fail("H_text must have d_model columns");
  if (mem.sequence.rows() < 1) fail("neural memory needs L >= 1 sequence rows");
  if (mem.sequence.cols() != d || mem.global.size() != d) fail("neural memory rows must have d_model entries");
}

// Forward intermediates shared with the backward pass.
template <typename Scalar>
struct Forward {
  Matrix<Scalar> projected;  // (L+1) x d_model
  Matrix<Scalar> q, k, v;
  Matrix<Scalar> weights;
  Matrix<Scalar> output;
  Scalar scale;
};

template <typename Scalar>
Forward<Scalar> forward(const Matrix<Scalar>& text, const NeuralMemory<Scalar>& mem, const AttentionParams<Scalar>& p) {
  check_shapes(text, mem, p);
  require_finite(text, "text hidden states");
  require_finite(mem.global, "global memory");
  require_finite(mem.sequence, "sequence memory");
  require_finite(p.w_proj, "W_proj");
  require_finite(p.w_q, "W_Q");
  require_finite(p.w_k, "W_K");
  require_finite(p.w_v, "W_V");

  Forward<Scalar> f;
  f.scale = Scalar(1) / std::sqrt(Scalar(p.d_k()));
  f.projected = mem.stacked() * p.w_proj;
  require_finite(f.projected, "memory projection");
  f.q = text * p.w_q;
  require_finite(f.q, "queries");
  f.k = f.projected * p.w_k;
  require_finite(f.k, "keys");
  f.v = f.projected * p.w_v;
  require_finite(f.v, "values");

  Matrix<Scalar> logits = (f.q * f.k.transpose()) * f.scale;
  require_finite(logits, "logits");
  // Row softmax with max subtraction.
  const Vector<Scalar> row_max = logits.rowwise().maxCoeff();
  f.weights = (logits.colwise() - row_max).array().exp().matrix();
  const Vector<Scalar> row_sum = f.weights.rowwise().sum();
  f.weights = row_sum.cwiseInverse().asDiagonal() * f.weights;
  require_finite(f.weights, "softmax");
  f.output = f.weights * f.v;
  require_finite(f.output, "output");
  return f;
}

}  // namespace detail

/// Cross-attention with text queries and neural keys/values:
/// Q = H W_Q, K = ([v; E] W_proj) W_K, V = ([v; E] W_proj) W_V,
/// A = softmax(Q K^T / sqrt(d_k)), output = A V.
template <typename Scalar>
AttentionOutput<Scalar> qkv_cross_attention(const Matrix<Scalar>& text, const NeuralMemory<Scalar>& mem,
                                            const AttentionParams<Scalar>& p) {
  auto f = detail::forward(text, mem, p);
  return {std::move(f.output), std::move(f.weights)};
}

/// Reverse-mode gradients of <upstream, output> with respect to the text
/// hidden states and both parts of the neural memory.
template <typename Scalar>
AttentionGradients<Scalar> attention_input_gradient(const Matrix<Scalar>& text, const NeuralMemory<Scalar>& mem,
                                                    const AttentionParams<Scalar>& p, const Matrix<Scalar>& upstream) {
  const auto f = detail::forward(text, mem, p);
  if (upstream.rows() != f.output.rows() || upstream.cols() != f.output.cols())
    throw InvalidArgument("attention_input_gradient: upstream must be T x d_k");
  detail::require_finite(upstream, "upstream gradient");

  const Matrix<Scalar> d_weights = upstream * f.v.transpose();
  const Matrix<Scalar> d_v = f.weights.transpose() * upstream;
  // softmax backward: dS = A .* (dA - rowsum(dA .* A))
  const Vector<Scalar> inner = d_weights.cwiseProduct(f.weights).rowwise().sum();
  const Matrix<Scalar> d_logits =
      (f.weights.array() * (d_weights.colwise() - inner).array()).matrix() * f.scale;
  const Matrix<Scalar> d_q = d_logits * f.k;
  const Matrix<Scalar> d_k = d_logits.transpose() * f.q;
  const Matrix<Scalar> d_projected = d_k * p.w_k.transpose() + d_v * p.w_v.transpose();
  const Matrix<Scalar> d_memory = d_projected * p.w_proj.transpose();

  AttentionGradients<Scalar> g;
  g.d_text = d_q * p.w_q.transpose();
  g.d_global = d_memory.row(0).transpose();
  g.d_sequence = d_memory.bottomRows(mem.sequence.rows());
  return g;
}

}  // namespace semeval
