#pragma once

#include <cstddef>
#include <vector>

#include "grat/decoder/decoder.hpp"

namespace grat::dec {

struct GeneratedGraph {
  graph::Graph graph;
  /// Sum of the log-softmax of every chosen label and edge class.
  double score = 0.0;
  /// max_nodes was reached before <EOG>.
  bool truncated = false;
};

/// Argmax decoding. Labels are chosen among real labels and <EOG>; an edge
/// class of "no edge" becomes NO_BOND. Throws ContractError if max_nodes is 0.
GeneratedGraph generate_greedy(const Decoder& decoder, const GenerationHeads& heads, const ad::Tensor& encoder_hidden,
                               std::size_t max_nodes);

/// Beam search over joint (label, edges) steps, best first. Each live
/// hypothesis proposes its `width` best labels and, per label, the `width`
/// best edge assignments; the pooled candidates are cut back to `width`.
/// Ties keep creation order. Throws ContractError for width 0.
std::vector<GeneratedGraph> generate_beam(const Decoder& decoder, const GenerationHeads& heads,
                                          const ad::Tensor& encoder_hidden, std::size_t width,
                                          std::size_t max_nodes);

}  // namespace grat::dec
