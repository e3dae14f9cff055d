#include "grat/decoder/batch.hpp"

#include "grat/error.hpp"

namespace grat::dec {

using graph::EdgeTypeVocab;
namespace edge = graph::edge;

namespace {

DecoderBatch layout(const graph::Graph& g) {
  const std::size_t k = g.size();
  const std::size_t len = 2 * k + 1;
  DecoderBatch b;
  b.steps = k;
  b.tokens.assign(len, graph::token::kGenerate);
  for (std::size_t j = 0; j < k; ++j) b.tokens[DecoderBatch::node_position(j)] = g.labels[j];

  b.edge_types.assign(len * len, edge::kNoBond);
  b.mask = ad::Mask(len, len, false);
  auto set_type = [&](std::size_t p, std::size_t q, graph::EdgeTypeId t) {
    b.edge_types[p * len + q] = t;
    b.edge_types[q * len + p] = t;
  };

  for (std::size_t s = 0; s <= k; ++s) {
    const std::size_t gp = DecoderBatch::generate_position(s);
    set_type(gp, gp, edge::kSelf);
    b.mask.set(gp, gp, true);
    // Generation path: <G> of step s sees itself and every node made so far.
    for (std::size_t j = 0; j < s; ++j) {
      const std::size_t np = DecoderBatch::node_position(j);
      set_type(gp, np, edge::kVirtual);
      b.mask.set(gp, np, true);
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t pi = DecoderBatch::node_position(i);
    set_type(pi, pi, edge::kSelf);
    b.mask.set(pi, pi, true);
    // Encoding path: node i sees earlier nodes it is bonded to, never a <G>.
    for (std::size_t j = 0; j < i; ++j) {
      const std::size_t pj = DecoderBatch::node_position(j);
      const graph::EdgeTypeId t = g.edge(i, j);
      set_type(pi, pj, t);
      if (t != edge::kNoBond) b.mask.set(pi, pj, true);
    }
  }
  return b;
}

}  // namespace

DecoderBatch build_decoder_batch(const graph::Graph& target) {
  DecoderBatch b = layout(target);
  const std::size_t k = target.size();
  for (std::size_t s = 0; s < k; ++s) b.node_targets.push_back(target.labels[s]);
  b.node_targets.push_back(graph::token::kEndOfGraph);
  for (std::size_t s = 1; s < k; ++s) {
    for (std::size_t j = 0; j < s; ++j) {
      b.edge_queries.push_back({s, j});
      b.edge_targets.push_back(EdgeTypeVocab::class_of(target.edge(s, j)));
    }
  }
  return b;
}

DecoderBatch build_prefix_batch(const graph::Graph& partial) {
  DecoderBatch b = layout(partial);
  const std::size_t k = partial.size();
  for (std::size_t j = 0; j < k; ++j) b.edge_queries.push_back({k, j});
  return b;
}

}  // namespace grat::dec
