#include "grat/graph/graph.hpp"

#include <string>

namespace grat::graph {

Graph Graph::with_labels(std::vector<LabelId> labels) {
  Graph g;
  const std::size_t n = labels.size();
  g.labels = std::move(labels);
  g.edges.assign(n * n, edge::kNoBond);
  for (std::size_t i = 0; i < n; ++i) g.edges[i * n + i] = edge::kSelf;
  return g;
}

void Graph::set_edge(std::size_t i, std::size_t j, EdgeTypeId type) {
  edges[i * size() + j] = type;
  edges[j * size() + i] = type;
}

std::size_t Graph::bond_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j)
      if (edge(i, j) != edge::kNoBond) ++count;
  return count;
}

bool is_special_token(LabelId id) { return id == token::kCls || NodeLabelVocab::is_delimiter(id); }

std::vector<Violation> validate(const Graph& g) {
  std::vector<Violation> out;
  const std::size_t n = g.size();
  auto pair_name = [](std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
  };

  if (g.edges.size() != n * n) {
    out.push_back({ViolationKind::kShape, "edge matrix holds " + std::to_string(g.edges.size()) + " entries for " +
                                              std::to_string(n) + " nodes"});
    return out;
  }
  if (g.node_features.size() != n * g.node_feature_dim) {
    out.push_back({ViolationKind::kShape, "node feature matrix has wrong size"});
  }
  if (g.edge_features.size() != n * n * g.edge_feature_dim) {
    out.push_back({ViolationKind::kShape, "edge feature array has wrong size"});
  }

  for (std::size_t i = 0; i < n; ++i) {
    const LabelId label = g.labels[i];
    if (label < token::kReservedCount && !(g.augmented && is_special_token(label))) {
      out.push_back({ViolationKind::kReservedLabel, "node " + std::to_string(i) + " carries reserved token " +
                                                        std::to_string(label)});
    }
    if (g.edge(i, i) != edge::kSelf) {
      out.push_back({ViolationKind::kDiagonalNotSelf, "diagonal entry " + pair_name(i, i) + " is not SELF"});
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const EdgeTypeId a = g.edge(i, j);
      if (a != g.edge(j, i)) {
        out.push_back({ViolationKind::kAsymmetric, "edges" + pair_name(i, j) + " != edges" + pair_name(j, i)});
        continue;
      }
      if (a == edge::kSelf) {
        out.push_back({ViolationKind::kSelfOffDiagonal, "SELF edge off the diagonal at " + pair_name(i, j)});
      } else if (a == edge::kVirtual) {
        const bool special = is_special_token(g.labels[i]) || is_special_token(g.labels[j]);
        if (!(g.augmented && special)) {
          out.push_back({ViolationKind::kReservedEdge, "VIRTUAL edge at " + pair_name(i, j)});
        }
      } else if (a == edge::kMaskEdge || a == edge::kNoEdge) {
        out.push_back({ViolationKind::kReservedEdge, "reserved edge type at " + pair_name(i, j)});
      }
    }
  }
  return out;
}

}  // namespace grat::graph
