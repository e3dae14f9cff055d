#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "grat/attention/layers.hpp"
#include "grat/graph/vocab.hpp"

namespace grat::attn {

/// Edge-conditioning MLP f_a: one-hot edge type (optionally followed by
/// scalar edge features) -> tanh hidden layer -> (gamma_l, beta_l) for every
/// layer l. The output layer starts at zero and gamma is read as 1 + raw, so
/// a fresh conditioner leaves attention unmodulated.
struct EdgeConditioner {
  Linear hidden;
  Linear out;
  std::size_t edge_types = 0;
  std::size_t edge_feature_dim = 0;
  std::size_t layers = 0;

  static EdgeConditioner create(ad::ParamStore& store, const std::string& name, std::size_t edge_types,
                                std::size_t edge_feature_dim, std::size_t hidden_width, std::size_t layers,
                                Rng& rng);
};

/// Per-layer gamma/beta matrices over a query x key edge-type grid.
struct FilmStack {
  std::vector<ad::Tensor> gamma;
  std::vector<ad::Tensor> beta;
};

/// Evaluates f_a on every (i, j) entry of `types` (rows x cols, row-major).
/// `edge_features`, when non-null, holds rows x cols x edge_feature_dim
/// values. Throws ContractError for an edge id outside the vocabulary.
FilmStack edge_gamma_beta(const EdgeConditioner& fa, const std::vector<graph::EdgeTypeId>& types, std::size_t rows,
                          std::size_t cols, const std::vector<double>* edge_features = nullptr);

}  // namespace grat::attn
