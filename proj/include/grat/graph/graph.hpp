#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grat/graph/vocab.hpp"

namespace grat::graph {

/// Labeled undirected graph with a dense, symmetric edge-type matrix.
///
/// Node order is the canonical order: the order nodes appear in the source
/// file or line notation. The diagonal always holds edge::kSelf and absent
/// pairs hold edge::kNoBond.
struct Graph {
  std::vector<LabelId> labels;
  std::vector<EdgeTypeId> edges;  // n x n, row-major

  std::size_t node_feature_dim = 0;
  std::vector<double> node_features;  // n x node_feature_dim
  std::size_t edge_feature_dim = 0;
  std::vector<double> edge_features;  // n x n x edge_feature_dim

  std::map<std::string, double> properties;
  /// Delimiter token placed in front of this graph when it is part of a
  /// multi-graph input.
  std::optional<LabelId> delimiter;
  /// Set once <CLS> or delimiter nodes (and their virtual links) were added.
  bool augmented = false;

  /// n nodes with the given labels, no bonds.
  static Graph with_labels(std::vector<LabelId> labels);

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }

  EdgeTypeId edge(std::size_t i, std::size_t j) const { return edges[i * size() + j]; }
  /// Sets both (i, j) and (j, i).
  void set_edge(std::size_t i, std::size_t j, EdgeTypeId type);
  std::size_t bond_count() const;

  double node_feature(std::size_t i, std::size_t f) const { return node_features[i * node_feature_dim + f]; }
  const double* edge_feature(std::size_t i, std::size_t j) const {
    return edge_features.data() + (i * size() + j) * edge_feature_dim;
  }

  bool operator==(const Graph&) const = default;
};

enum class ViolationKind {
  kShape,
  kAsymmetric,
  kDiagonalNotSelf,
  kSelfOffDiagonal,
  kReservedEdge,
  kReservedLabel,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

/// Checks every Graph invariant and reports violations; never throws.
std::vector<Violation> validate(const Graph& g);

/// Whether `id` may label a node of an augmented graph.
bool is_special_token(LabelId id);

}  // namespace grat::graph
