#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "grat/graph/graph.hpp"

namespace grat::graph {

/// Bijection over node indices: node i moves to position map[i].
class GraphPermutation {
 public:
  /// Throws ContractError unless `map` is a permutation of 0..n-1.
  explicit GraphPermutation(std::vector<std::size_t> map);
  static GraphPermutation identity(std::size_t n);

  std::size_t size() const { return map_.size(); }
  std::size_t operator()(std::size_t i) const { return map_[i]; }
  const std::vector<std::size_t>& map() const { return map_; }

  GraphPermutation inverse() const;
  /// (this ∘ first)(i) = this(first(i)).
  GraphPermutation after(const GraphPermutation& first) const;

 private:
  std::vector<std::size_t> map_;
};

/// labels'[π(i)] = labels[i], edges'[π(i)][π(j)] = edges[i][j]; features follow.
Graph permute(const Graph& g, const GraphPermutation& pi);

/// Inserts `token` as node 0 linked to every original node by `link`.
Graph prepend_token(const Graph& g, LabelId token, EdgeTypeId link = edge::kVirtual);

/// Disjoint union of the parts, each preceded by its delimiter node. A
/// delimiter is linked to its own part by VIRTUAL edges; all cross-part
/// pairs are NO_BOND.
Graph concat_graphs(const std::vector<std::pair<LabelId, Graph>>& parts);

/// Subgraph induced by the first `count` nodes.
Graph prefix_subgraph(const Graph& g, std::size_t count);

}  // namespace grat::graph
