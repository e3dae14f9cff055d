#include "grat/attention/attention.hpp"

#include "grat/error.hpp"

namespace grat::attn {

ad::Mask neighbor_mask(const std::vector<graph::EdgeTypeId>& types, std::size_t n, bool neighbor_only) {
  if (types.size() != n * n) throw DimensionError("neighbor_mask: edge grid is not n x n");
  ad::Mask mask(n, n, true);
  if (!neighbor_only) return mask;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (types[i * n + j] == graph::edge::kNoBond) mask.set(i, j, false);
  return mask;
}

}  // namespace grat::attn
