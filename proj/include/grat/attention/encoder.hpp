#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "grat/attention/conditioner.hpp"
#include "grat/attention/layers.hpp"
#include "grat/graph/graph.hpp"

namespace grat::attn {

struct EncoderConfig {
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t width = 64;
  std::size_t ff_width = 128;
  std::size_t conditioner_width = 16;
  bool use_positional_encoding = false;
  bool neighbor_only = false;
  std::size_t max_context = 64;

  /// Throws ContractError when a size is zero or width % heads != 0.
  void check() const;
  bool operator==(const EncoderConfig&) const = default;
};

struct EncoderLayer {
  MultiHeadAttention self_attention;
  LayerNormParams norm1;
  FeedForward feed_forward;
  LayerNormParams norm2;
};

struct Encoder {
  EncoderConfig config;
  ad::Tensor embedding;  // labels x width
  std::optional<Linear> feature_projection;
  EdgeConditioner conditioner;
  std::vector<EncoderLayer> layers;

  static Encoder create(ad::ParamStore& store, const std::string& name, const EncoderConfig& config,
                        std::size_t label_count, std::size_t edge_type_count, std::size_t node_feature_dim,
                        std::size_t edge_feature_dim, Rng& rng);
};

struct EncodeOutput {
  ad::Tensor hidden;                            // n x width
  std::vector<ad::AttentionResult> attention;  // one per layer
};

/// Post-norm stack: x = norm(x + attn(x)); x = norm(x + ff(x)) per layer,
/// attention conditioned on the graph's edge types. Input is the label
/// embedding plus projected node features plus, when enabled, a sinusoidal
/// position code. Throws CapacityError above config.max_context nodes.
EncodeOutput encode(const Encoder& encoder, const graph::Graph& g);

/// Final hidden vector of node 0 (the <CLS> token).
ad::Tensor readout_cls(const ad::Tensor& hidden);

}  // namespace grat::attn
