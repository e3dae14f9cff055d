#include "grat/graph/transform.hpp"

#include "grat/error.hpp"

namespace grat::graph {

GraphPermutation::GraphPermutation(std::vector<std::size_t> map) : map_(std::move(map)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t target : map_) {
    if (target >= map_.size() || seen[target]) throw ContractError("not a permutation of 0..n-1");
    seen[target] = true;
  }
}

GraphPermutation GraphPermutation::identity(std::size_t n) {
  std::vector<std::size_t> map(n);
  for (std::size_t i = 0; i < n; ++i) map[i] = i;
  return GraphPermutation(std::move(map));
}

GraphPermutation GraphPermutation::inverse() const {
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = i;
  return GraphPermutation(std::move(inv));
}

GraphPermutation GraphPermutation::after(const GraphPermutation& first) const {
  if (first.size() != size()) throw ContractError("composing permutations of different sizes");
  std::vector<std::size_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = map_[first(i)];
  return GraphPermutation(std::move(out));
}

Graph permute(const Graph& g, const GraphPermutation& pi) {
  const std::size_t n = g.size();
  if (pi.size() != n) {
    throw ContractError("permutation of size " + std::to_string(pi.size()) + " applied to a graph of " +
                        std::to_string(n) + " nodes");
  }
  Graph out = g;
  for (std::size_t i = 0; i < n; ++i) {
    out.labels[pi(i)] = g.labels[i];
    for (std::size_t j = 0; j < n; ++j) out.edges[pi(i) * n + pi(j)] = g.edges[i * n + j];
  }
  const std::size_t f = g.node_feature_dim;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < f; ++k) out.node_features[pi(i) * f + k] = g.node_features[i * f + k];
  const std::size_t e = g.edge_feature_dim;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < e; ++k)
        out.edge_features[(pi(i) * n + pi(j)) * e + k] = g.edge_features[(i * n + j) * e + k];
  return out;
}

namespace {

/// Copies `part` into `out` with its nodes starting at `offset`.
void place(Graph& out, const Graph& part, std::size_t offset) {
  const std::size_t n = out.size(), m = part.size();
  for (std::size_t i = 0; i < m; ++i) {
    out.labels[offset + i] = part.labels[i];
    for (std::size_t j = 0; j < m; ++j) out.edges[(offset + i) * n + offset + j] = part.edge(i, j);
  }
  const std::size_t f = out.node_feature_dim;
  for (std::size_t i = 0; i < m && f; ++i)
    for (std::size_t k = 0; k < f; ++k) out.node_features[(offset + i) * f + k] = part.node_feature(i, k);
  const std::size_t e = out.edge_feature_dim;
  for (std::size_t i = 0; i < m && e; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < e; ++k)
        out.edge_features[((offset + i) * n + offset + j) * e + k] = part.edge_feature(i, j)[k];
}

}  // namespace

Graph prepend_token(const Graph& g, LabelId token, EdgeTypeId link) {
  if (token >= token::kReservedCount) {
    throw ContractError("prepend_token: label " + std::to_string(token) + " is not a reserved token");
  }
  std::vector<LabelId> labels(g.size() + 1, token);
  Graph out = Graph::with_labels(std::move(labels));
  out.node_feature_dim = g.node_feature_dim;
  out.node_features.assign(out.size() * g.node_feature_dim, 0.0);
  out.edge_feature_dim = g.edge_feature_dim;
  out.edge_features.assign(out.size() * out.size() * g.edge_feature_dim, 0.0);
  place(out, g, 1);
  for (std::size_t i = 1; i < out.size(); ++i) out.set_edge(0, i, link);
  out.properties = g.properties;
  out.augmented = true;
  return out;
}

Graph concat_graphs(const std::vector<std::pair<LabelId, Graph>>& parts) {
  if (parts.empty()) throw ContractError("concat_graphs: no parts");
  std::size_t total = 0;
  const std::size_t f = parts.front().second.node_feature_dim;
  const std::size_t e = parts.front().second.edge_feature_dim;
  for (const auto& [delim, part] : parts) {
    if (!NodeLabelVocab::is_delimiter(delim) && delim != token::kCls) {
      throw ContractError("concat_graphs: label " + std::to_string(delim) + " is not a delimiter token");
    }
    if (part.node_feature_dim != f || part.edge_feature_dim != e) {
      throw ContractError("concat_graphs: parts disagree on feature widths");
    }
    total += part.size() + 1;
  }
  Graph out = Graph::with_labels(std::vector<LabelId>(total, token::kPad));
  out.node_feature_dim = f;
  out.node_features.assign(total * f, 0.0);
  out.edge_feature_dim = e;
  out.edge_features.assign(total * total * e, 0.0);
  std::size_t offset = 0;
  for (const auto& [delim, part] : parts) {
    out.labels[offset] = delim;
    place(out, part, offset + 1);
    for (std::size_t i = 0; i < part.size(); ++i) out.set_edge(offset, offset + 1 + i, edge::kVirtual);
    offset += part.size() + 1;
  }
  out.augmented = true;
  return out;
}

Graph prefix_subgraph(const Graph& g, std::size_t count) {
  if (count > g.size()) throw ContractError("prefix_subgraph: count exceeds node count");
  Graph out = Graph::with_labels(std::vector<LabelId>(g.labels.begin(), g.labels.begin() + count));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < count; ++j) out.edges[i * count + j] = g.edge(i, j);
  out.node_feature_dim = g.node_feature_dim;
  out.node_features.assign(g.node_features.begin(), g.node_features.begin() + count * g.node_feature_dim);
  out.edge_feature_dim = g.edge_feature_dim;
  out.edge_features.assign(count * count * g.edge_feature_dim, 0.0);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < count; ++j)
      for (std::size_t k = 0; k < g.edge_feature_dim; ++k)
        out.edge_features[(i * count + j) * g.edge_feature_dim + k] = g.edge_feature(i, j)[k];
  out.augmented = g.augmented;
  return out;
}

}  // namespace grat::graph
