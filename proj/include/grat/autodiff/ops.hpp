#pragma once

#include <cstddef>
#include <vector>

#include "grat/autodiff/tensor.hpp"

// Differentiable tensor operations. Matrix ops take rank-2 operands; every
// op validates shapes and throws DimensionError naming the offending shapes.
namespace grat::ad {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, Shape shape);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
/// a[m x n] + bias[n] broadcast over rows.
Tensor add_row(const Tensor& a, const Tensor& bias);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double value);

Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor abs(const Tensor& a);

Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t count);
Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t count);
/// Rows of `table` picked by index; out-of-range indices are a ContractError.
Tensor gather_rows(const Tensor& table, const std::vector<std::size_t>& index);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

/// Row-wise normalization with learned gain/bias of width cols(x).
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);

struct SoftmaxResult {
  Tensor probs;
  /// Rows with no attendable entry; they come back as all zeros.
  std::size_t fully_masked_rows = 0;
};

/// Row softmax stabilized by the row maximum. Masked entries are exactly 0.
SoftmaxResult softmax_rows(const Tensor& x, const Mask* mask = nullptr);

/// Mean negative log-likelihood of integer targets under row-softmax of
/// `logits`. Returns a constant 0 for zero rows.
Tensor cross_entropy(const Tensor& logits, const std::vector<std::size_t>& targets);

struct AttentionResult {
  Tensor output;
  /// Post-softmax weights, heads x queries x keys, row-major.
  std::vector<double> weights;
  std::size_t heads = 0;
  std::size_t fully_masked_rows = 0;

  double weight(std::size_t head, std::size_t i, std::size_t j) const;
};

/// Multi-head attention with feature-wise modulation of the logits:
/// softmax((gamma * (Q_h K_h^T) + beta) / sqrt(d_k)) V_h for each head h.
/// gamma/beta are queries x keys and shared by all heads; the modulation is
/// applied before the division. Masked logits act as -infinity.
AttentionResult film_attention(const Tensor& q, const Tensor& k, const Tensor& v, const Tensor& gamma,
                               const Tensor& beta, const Mask* mask, std::size_t heads);

/// Unmodulated softmax(Q_h K_h^T / sqrt(d_k)) V_h.
AttentionResult scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v, const Mask* mask,
                                     std::size_t heads);

}  // namespace grat::ad
