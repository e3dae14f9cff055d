#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "grat/pipeline/model.hpp"

namespace grat::pipe {

struct AttentionMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  // n x n, row = query node
};

/// Post-softmax encoder self-attention of `layer` (1-based) for g, averaged
/// over heads unless `head` (0-based) is given. Throws ContractError for an
/// out-of-range layer or head.
AttentionMatrix attention_matrix(const GratModel& model, const graph::Graph& g, std::size_t layer,
                                 std::optional<std::size_t> head = std::nullopt);

/// CSV with the node labels as header row and first column.
std::string attention_csv(const AttentionMatrix& m);

}  // namespace grat::pipe
