#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "grat/autodiff/ops.hpp"
#include "grat/autodiff/params.hpp"
#include "grat/rng.hpp"

namespace grat::attn {

enum class Init { kXavier, kZero };

/// y = x W + b with W stored in x out.
struct Linear {
  ad::Tensor weight;
  ad::Tensor bias;

  static Linear create(ad::ParamStore& store, const std::string& name, std::size_t in, std::size_t out, Rng& rng,
                       Init init = Init::kXavier);

  std::size_t in_width() const { return weight.dim(0); }
  std::size_t out_width() const { return weight.dim(1); }
  ad::Tensor operator()(const ad::Tensor& x) const { return ad::add_row(ad::matmul(x, weight), bias); }
};

struct LayerNormParams {
  ad::Tensor gain;
  ad::Tensor bias;

  static LayerNormParams create(ad::ParamStore& store, const std::string& name, std::size_t width);
  ad::Tensor operator()(const ad::Tensor& x) const { return ad::layer_norm(x, gain, bias); }
};

/// Inverted dropout, active only while a DropoutScope is alive on this
/// thread; otherwise returns x unchanged.
ad::Tensor dropout(const ad::Tensor& x);

class DropoutScope {
 public:
  DropoutScope(double rate, Rng& rng);
  ~DropoutScope();
  DropoutScope(const DropoutScope&) = delete;
  DropoutScope& operator=(const DropoutScope&) = delete;

 private:
  double previous_rate_;
  Rng* previous_rng_;
};

/// Position-wise relu MLP.
struct FeedForward {
  Linear in;
  Linear out;

  static FeedForward create(ad::ParamStore& store, const std::string& name, std::size_t width, std::size_t hidden,
                            Rng& rng);
  ad::Tensor operator()(const ad::Tensor& x) const { return dropout(out(ad::relu(in(x)))); }
};

struct Modulation {
  const ad::Tensor* gamma = nullptr;
  const ad::Tensor* beta = nullptr;
};

struct MultiHeadAttention {
  Linear query;
  Linear key;
  Linear value;
  Linear output;
  std::size_t heads = 1;

  static MultiHeadAttention create(ad::ParamStore& store, const std::string& name, std::size_t width,
                                   std::size_t heads, Rng& rng);

  struct Result {
    ad::Tensor value;
    ad::AttentionResult attention;
  };

  /// Queries from `x`, keys/values from `memory`. With a modulation the
  /// logits go through film_attention, otherwise plain scaled dot-product.
  Result operator()(const ad::Tensor& x, const ad::Tensor& memory, Modulation film, const ad::Mask* mask) const;
};

/// Constant sinusoidal position table, positions x width.
ad::Tensor sinusoidal_encoding(std::size_t positions, std::size_t width);
/// Same code at arbitrary (possibly fractional) positions.
ad::Tensor sinusoidal_encoding(const std::vector<double>& positions, std::size_t width);

}  // namespace grat::attn
