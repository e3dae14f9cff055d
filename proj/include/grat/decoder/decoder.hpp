#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "grat/attention/conditioner.hpp"
#include "grat/attention/layers.hpp"
#include "grat/decoder/batch.hpp"

namespace grat::dec {

struct DecoderConfig {
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t width = 64;
  std::size_t ff_width = 128;
  std::size_t conditioner_width = 16;
  /// Raw sequence position 0..2k is encoded when enabled.
  bool use_positional_encoding = true;
  /// Longest decoder sequence (2k+1 tokens).
  std::size_t max_context = 129;

  void check() const;
  bool operator==(const DecoderConfig&) const = default;
};

/// Output heads: f_l (labels), f_p (pair projection) and f_e (edge classes
/// from the concatenated projections of the new node and an earlier node).
struct GenerationHeads {
  attn::Linear label;
  attn::Linear pair_projection;
  attn::Linear edge_hidden;
  attn::Linear edge_out;

  static GenerationHeads create(ad::ParamStore& store, const std::string& name, std::size_t width,
                                std::size_t label_count, std::size_t pair_width, std::size_t edge_hidden,
                                std::size_t edge_classes, Rng& rng);

  std::size_t label_count() const { return label.out_width(); }
  std::size_t edge_class_count() const { return edge_out.out_width(); }

  ad::Tensor labels(const ad::Tensor& h) const { return label(h); }
  ad::Tensor project(const ad::Tensor& h) const { return pair_projection(h); }
  /// f_e over row pairs (left[r], right[r]), both already projected.
  ad::Tensor edges(const ad::Tensor& left, const ad::Tensor& right) const;
};

/// Edge-recovery head used by masked-graph pretraining: f_p/f_e shape over
/// encoder outputs.
struct PairHead {
  attn::Linear projection;
  attn::Linear hidden;
  attn::Linear out;

  static PairHead create(ad::ParamStore& store, const std::string& name, std::size_t width, std::size_t pair_width,
                         std::size_t hidden_width, std::size_t classes, Rng& rng);
  ad::Tensor operator()(const ad::Tensor& h, const std::vector<std::size_t>& left,
                        const std::vector<std::size_t>& right) const;
};

struct DecoderLayer {
  attn::MultiHeadAttention self_attention;
  attn::LayerNormParams norm1;
  attn::MultiHeadAttention cross_attention;
  attn::LayerNormParams norm2;
  attn::FeedForward feed_forward;
  attn::LayerNormParams norm3;
};

struct Decoder {
  DecoderConfig config;
  ad::Tensor embedding;  // labels x width
  attn::EdgeConditioner conditioner;
  std::vector<DecoderLayer> layers;

  static Decoder create(ad::ParamStore& store, const std::string& name, const DecoderConfig& config,
                        std::size_t label_count, std::size_t edge_type_count, Rng& rng);
};

struct DecodeOptions {
  /// Added to the input embeddings (sequence x width) before the first
  /// layer; lets tests perturb individual positions.
  const ad::Tensor* input_offset = nullptr;
};

struct DecodeOutput {
  ad::Tensor hidden;       // sequence x width
  ad::Tensor node_logits;  // (k+1) x labels, one row per <G>
  ad::Tensor edge_logits;  // queries x edge classes, rows follow batch.edge_queries
  std::vector<ad::AttentionResult> self_attention;
};

/// Runs the masked decoder stack over a batch: per layer, edge-conditioned
/// self-attention under batch.mask, vanilla cross-attention to the encoder
/// output and a feed-forward block, each with residual + post-norm.
/// Throws CapacityError for sequences longer than config.max_context.
DecodeOutput decode_forward(const Decoder& decoder, const GenerationHeads& heads, const ad::Tensor& encoder_hidden,
                            const DecoderBatch& batch, DecodeOptions options = {});

/// Mean cross-entropy of the node targets plus that of the edge targets
/// (the edge term is 0 when the batch has no edge targets).
struct DecoderLoss {
  ad::Tensor total;
  ad::Tensor node;
  ad::Tensor edge;
};
DecoderLoss decoder_loss(const DecodeOutput& out, const DecoderBatch& batch);

}  // namespace grat::dec
