#include "grat/attention/conditioner.hpp"

#include "grat/error.hpp"

namespace grat::attn {

EdgeConditioner EdgeConditioner::create(ad::ParamStore& store, const std::string& name, std::size_t edge_types,
                                        std::size_t edge_feature_dim, std::size_t hidden_width, std::size_t layers,
                                        Rng& rng) {
  EdgeConditioner fa;
  fa.hidden = Linear::create(store, name + ".hidden", edge_types + edge_feature_dim, hidden_width, rng);
  fa.out = Linear::create(store, name + ".out", hidden_width, 2 * layers, rng, Init::kZero);
  fa.edge_types = edge_types;
  fa.edge_feature_dim = edge_feature_dim;
  fa.layers = layers;
  return fa;
}

FilmStack edge_gamma_beta(const EdgeConditioner& fa, const std::vector<graph::EdgeTypeId>& types, std::size_t rows,
                          std::size_t cols, const std::vector<double>* edge_features) {
  if (types.size() != rows * cols) throw DimensionError("edge_gamma_beta: edge grid size mismatch");
  for (graph::EdgeTypeId t : types) {
    if (t >= fa.edge_types) throw ContractError("edge_gamma_beta: unknown edge type id " + std::to_string(t));
  }
  const bool with_features = edge_features != nullptr && fa.edge_feature_dim > 0;
  if (with_features && edge_features->size() != rows * cols * fa.edge_feature_dim) {
    throw DimensionError("edge_gamma_beta: edge feature array size mismatch");
  }

  ad::Tensor raw;
  if (!with_features) {
    // f_a depends on the edge type only: evaluate once per type, then gather.
    const std::size_t e = fa.edge_types;
    std::vector<double> eye(e * (e + fa.edge_feature_dim), 0.0);
    for (std::size_t t = 0; t < e; ++t) eye[t * (e + fa.edge_feature_dim) + t] = 1.0;
    const ad::Tensor onehot = ad::Tensor::matrix(e, e + fa.edge_feature_dim, std::move(eye));
    const ad::Tensor table = fa.out(ad::tanh(fa.hidden(onehot)));
    std::vector<std::size_t> index(types.begin(), types.end());
    raw = ad::gather_rows(table, index);
  } else {
    const std::size_t width = fa.edge_types + fa.edge_feature_dim;
    std::vector<double> x(rows * cols * width, 0.0);
    for (std::size_t p = 0; p < rows * cols; ++p) {
      x[p * width + types[p]] = 1.0;
      for (std::size_t k = 0; k < fa.edge_feature_dim; ++k)
        x[p * width + fa.edge_types + k] = (*edge_features)[p * fa.edge_feature_dim + k];
    }
    raw = fa.out(ad::tanh(fa.hidden(ad::Tensor::matrix(rows * cols, width, std::move(x)))));
  }

  FilmStack stack;
  for (std::size_t l = 0; l < fa.layers; ++l) {
    stack.gamma.push_back(ad::add_scalar(ad::reshape(ad::slice_cols(raw, 2 * l, 1), {rows, cols}), 1.0));
    stack.beta.push_back(ad::reshape(ad::slice_cols(raw, 2 * l + 1, 1), {rows, cols}));
  }
  return stack;
}

}  // namespace grat::attn
