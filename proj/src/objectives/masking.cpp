#include "grat/objectives/masking.hpp"

#include <algorithm>

#include "grat/error.hpp"
#include "grat/graph/transform.hpp"

namespace grat::obj {

namespace edge = graph::edge;
namespace token = graph::token;

MaskedGraphSample mask_graph(const graph::Graph& g, double rate, Rng& rng) {
  if (g.empty()) throw ContractError("mask_graph: empty graph");
  if (!(rate > 0.0 && rate < 1.0)) throw ContractError("mask_graph: rate must lie in (0, 1)");
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.labels[i] >= token::kReservedCount) eligible.push_back(i);
  }
  if (eligible.empty()) throw ContractError("mask_graph: graph has no maskable node");

  const std::size_t n = eligible.size();
  const double expected = rate * static_cast<double>(n);
  std::size_t count = 1;
  if (n > 1 && expected > 1.0) {
    const double p = (expected - 1.0) / static_cast<double>(n - 1);
    for (std::size_t i = 1; i < n; ++i) count += rng.bernoulli(p) ? 1 : 0;
  }
  rng.shuffle(eligible);
  std::vector<std::size_t> chosen(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(chosen.begin(), chosen.end());

  MaskedGraphSample s;
  s.corrupted = g;
  std::vector<char> masked(g.size(), 0);
  for (std::size_t i : chosen) {
    masked[i] = 1;
    s.masked_nodes.push_back(i);
    s.node_targets.push_back(g.labels[i]);
    s.corrupted.labels[i] = token::kMask;
  }
  // Pairs in (i > j) order; a pair with two masked ends is decided once.
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (!masked[i] && !masked[j]) continue;
      const graph::EdgeTypeId t = g.edge(i, j);
      if (t < edge::kReservedCount) continue;
      if (!rng.bernoulli(0.5)) continue;
      s.corrupted.set_edge(i, j, edge::kMaskEdge);
      s.masked_edges.emplace_back(i, j);
      s.edge_targets.push_back(t);
    }
  }
  return s;
}

PretrainLosses pretrain_losses(const attn::Encoder& encoder, const attn::Linear& label_head,
                               const dec::PairHead& edge_head, const PropertyHead* property_head,
                               const MaskedGraphSample& sample, const std::vector<double>* graph_targets) {
  if (sample.masked_nodes.empty() && sample.masked_edges.empty()) {
    throw ContractError("pretrain_losses: sample has no masked position");
  }
  const graph::Graph input = graph::prepend_token(sample.corrupted, token::kCls);
  const ad::Tensor h = attn::encode(encoder, input).hidden;

  PretrainLosses out;
  std::vector<std::size_t> rows, targets;
  for (std::size_t k = 0; k < sample.masked_nodes.size(); ++k) {
    rows.push_back(sample.masked_nodes[k] + 1);
    targets.push_back(sample.node_targets[k]);
  }
  out.node = ad::cross_entropy(label_head(ad::gather_rows(h, rows)), targets);

  std::vector<std::size_t> left, right, classes;
  for (std::size_t k = 0; k < sample.masked_edges.size(); ++k) {
    left.push_back(sample.masked_edges[k].first + 1);
    right.push_back(sample.masked_edges[k].second + 1);
    classes.push_back(graph::EdgeTypeVocab::class_of(sample.edge_targets[k]));
  }
  out.edge = ad::cross_entropy(edge_head(h, left, right), classes);
  out.total = ad::add(out.node, out.edge);

  if (graph_targets != nullptr) {
    if (property_head == nullptr) throw ContractError("pretrain_losses: graph targets need a property head");
    out.graph = l1_loss((*property_head)(attn::readout_cls(h)), *graph_targets);
    out.total = ad::add(out.total, out.graph);
  } else {
    out.graph = ad::Tensor::scalar(0.0);
  }
  return out;
}

}  // namespace grat::obj
