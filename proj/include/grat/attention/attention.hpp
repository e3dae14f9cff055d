#pragma once

#include <cstddef>
#include <vector>

#include "grat/autodiff/tensor.hpp"
#include "grat/graph/vocab.hpp"

namespace grat::attn {

/// n x n attention mask over an edge-type grid. With `neighbor_only`,
/// NO_BOND pairs are blocked; SELF, VIRTUAL and real bonds stay open.
ad::Mask neighbor_mask(const std::vector<graph::EdgeTypeId>& types, std::size_t n, bool neighbor_only);

}  // namespace grat::attn
