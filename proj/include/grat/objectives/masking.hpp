#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "grat/attention/encoder.hpp"
#include "grat/decoder/decoder.hpp"
#include "grat/objectives/losses.hpp"
#include "grat/rng.hpp"

namespace grat::obj {

struct MaskedGraphSample {
  graph::Graph corrupted;
  std::vector<std::size_t> masked_nodes;  // ascending
  std::vector<graph::LabelId> node_targets;
  std::vector<std::pair<std::size_t, std::size_t>> masked_edges;  // (i, j), i > j
  std::vector<graph::EdgeTypeId> edge_targets;
};

/// Replaces node labels with <MASK> and, for each masked node, every incident
/// real bond with MASK_EDGE with probability 0.5 (once per pair). Only
/// non-reserved nodes are eligible. Each eligible node is masked with
/// probability `rate`, and at least one is always masked: the masked count
/// is 1 + Binomial(n - 1, (rate n - 1) / (n - 1)), or exactly 1 when
/// rate n < 1, and the set is uniform given its size.
/// Throws ContractError for an empty graph, no eligible node or rate
/// outside (0, 1).
MaskedGraphSample mask_graph(const graph::Graph& g, double rate, Rng& rng);

struct PretrainLosses {
  ad::Tensor total;
  ad::Tensor node;
  ad::Tensor edge;
  ad::Tensor graph;  // 0 when no graph targets are given
};

/// Encodes <CLS> + corrupted graph; node recovery through `label_head`,
/// edge recovery through `edge_head` on masked pairs and, with targets, L1 of
/// `property_head` on the <CLS> readout.
/// Throws ContractError when nothing is masked.
PretrainLosses pretrain_losses(const attn::Encoder& encoder, const attn::Linear& label_head,
                               const dec::PairHead& edge_head, const PropertyHead* property_head,
                               const MaskedGraphSample& sample, const std::vector<double>* graph_targets = nullptr);

}  // namespace grat::obj
