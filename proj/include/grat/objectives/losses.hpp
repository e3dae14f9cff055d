#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "grat/attention/encoder.hpp"
#include "grat/decoder/decoder.hpp"

namespace grat::obj {

/// Mean absolute error over the tasks present in both maps.
/// Throws ContractError when no task is shared.
double regression_loss(const std::map<std::string, double>& pred, const std::map<std::string, double>& target);

/// Differentiable mean |pred - target|; pred is any tensor with target.size() values.
ad::Tensor l1_loss(const ad::Tensor& pred, const std::vector<double>& target);

/// Graph-level regression head on a readout vector: Linear, relu, Linear.
struct PropertyHead {
  attn::Linear hidden;
  attn::Linear out;

  static PropertyHead create(ad::ParamStore& store, const std::string& name, std::size_t width,
                             std::size_t hidden_width, std::size_t tasks, Rng& rng);
  std::size_t task_count() const { return out.out_width(); }
  /// readout: [width] or 1 x width; returns 1 x tasks.
  ad::Tensor operator()(const ad::Tensor& readout) const;
};

/// Property prediction for one graph: <CLS> is prepended, the graph is
/// encoded and the head reads the <CLS> row.
ad::Tensor predict_properties(const attn::Encoder& encoder, const PropertyHead& head, const graph::Graph& g);

struct TranslationLoss {
  ad::Tensor total;
  ad::Tensor node;
  ad::Tensor edge;
};

/// Teacher-forced node + edge cross-entropy (weighted 1:1) for one pair.
TranslationLoss translation_loss(const attn::Encoder& encoder, const dec::Decoder& decoder,
                                 const dec::GenerationHeads& heads, const graph::Graph& source,
                                 const graph::Graph& target);

}  // namespace grat::obj
