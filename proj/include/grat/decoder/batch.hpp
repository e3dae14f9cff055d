#pragma once

#include <cstddef>
#include <vector>

#include "grat/autodiff/tensor.hpp"
#include "grat/graph/graph.hpp"

namespace grat::dec {

/// One (step, earlier node) edge decision.
struct EdgeQuery {
  std::size_t step;
  std::size_t node;
  bool operator==(const EdgeQuery&) const = default;
};

/// Flattened decoder input for one target graph of k nodes:
///
///   position: 0    1   2    3   ...  2k-1  2k
///   token:    <G>  n0  <G>  n1  ...  n_k-1 <G>
///
/// The <G> at position 2s generates node s (or <EOG> when s == k); the node
/// token at 2s+1 carries node s through the sub-graph encoding path.
struct DecoderBatch {
  std::size_t steps = 0;                     // k
  std::vector<graph::LabelId> tokens;        // 2k+1
  std::vector<graph::EdgeTypeId> edge_types; // (2k+1)^2
  ad::Mask mask;                             // true = may attend
  std::vector<graph::LabelId> node_targets;  // per <G>, last is <EOG>; empty for prefix batches
  std::vector<EdgeQuery> edge_queries;
  std::vector<std::size_t> edge_targets;     // decoder edge classes, parallel to edge_queries

  std::size_t length() const { return tokens.size(); }
  static std::size_t generate_position(std::size_t step) { return 2 * step; }
  static std::size_t node_position(std::size_t node) { return 2 * node + 1; }
};

/// Teacher-forced batch: all k+1 label targets and, for each step s < k,
/// one edge target per earlier node j < s (class 0 where there is no bond).
DecoderBatch build_decoder_batch(const graph::Graph& target);

/// Same layout for a partially generated graph of k nodes, without targets.
/// Its edge queries are those of the pending step k, so one forward pass
/// yields everything needed to grow the graph by one node.
DecoderBatch build_prefix_batch(const graph::Graph& partial);

}  // namespace grat::dec
