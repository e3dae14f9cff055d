#include "grat/attention/encoder.hpp"

#include "grat/attention/attention.hpp"
#include "grat/error.hpp"

namespace grat::attn {

void EncoderConfig::check() const {
  if (layers == 0 || heads == 0 || width == 0 || ff_width == 0 || conditioner_width == 0 || max_context == 0) {
    throw ContractError("encoder sizes must be positive");
  }
  if (width % heads != 0) {
    throw ContractError("width " + std::to_string(width) + " is not divisible by " + std::to_string(heads) + " heads");
  }
}

Encoder Encoder::create(ad::ParamStore& store, const std::string& name, const EncoderConfig& config,
                        std::size_t label_count, std::size_t edge_type_count, std::size_t node_feature_dim,
                        std::size_t edge_feature_dim, Rng& rng) {
  config.check();
  Encoder enc;
  enc.config = config;
  std::vector<double> table(label_count * config.width);
  for (double& x : table) x = rng.normal() * 0.1;
  enc.embedding = store.add(name + ".embedding", {label_count, config.width}, std::move(table));
  if (node_feature_dim > 0) {
    enc.feature_projection = Linear::create(store, name + ".feature_projection", node_feature_dim, config.width, rng);
  }
  enc.conditioner = EdgeConditioner::create(store, name + ".conditioner", edge_type_count, edge_feature_dim,
                                            config.conditioner_width, config.layers, rng);
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::string prefix = name + ".layer" + std::to_string(l);
    enc.layers.push_back(EncoderLayer{
        MultiHeadAttention::create(store, prefix + ".self", config.width, config.heads, rng),
        LayerNormParams::create(store, prefix + ".norm1", config.width),
        FeedForward::create(store, prefix + ".ff", config.width, config.ff_width, rng),
        LayerNormParams::create(store, prefix + ".norm2", config.width),
    });
  }
  return enc;
}

EncodeOutput encode(const Encoder& encoder, const graph::Graph& g) {
  const EncoderConfig& cfg = encoder.config;
  const std::size_t n = g.size();
  if (n == 0) throw ContractError("encode: empty graph");
  if (n > cfg.max_context) {
    throw CapacityError("graph of " + std::to_string(n) + " nodes exceeds the encoder context of " +
                        std::to_string(cfg.max_context));
  }

  ad::Tensor x = ad::gather_rows(encoder.embedding, std::vector<std::size_t>(g.labels.begin(), g.labels.end()));
  if (encoder.feature_projection) {
    if (g.node_feature_dim != encoder.feature_projection->in_width()) {
      throw DimensionError("encode: graph has " + std::to_string(g.node_feature_dim) + " node features, model expects " +
                           std::to_string(encoder.feature_projection->in_width()));
    }
    x = ad::add(x, (*encoder.feature_projection)(ad::Tensor::matrix(n, g.node_feature_dim, g.node_features)));
  }
  if (cfg.use_positional_encoding) {
    x = ad::add(x, sinusoidal_encoding(n, cfg.width));
  }

  x = dropout(x);

  const std::vector<double>* edge_features = g.edge_feature_dim > 0 ? &g.edge_features : nullptr;
  const FilmStack film = edge_gamma_beta(encoder.conditioner, g.edges, n, n, edge_features);
  const ad::Mask mask = neighbor_mask(g.edges, n, cfg.neighbor_only);

  EncodeOutput out;
  for (std::size_t l = 0; l < encoder.layers.size(); ++l) {
    const EncoderLayer& layer = encoder.layers[l];
    auto att = layer.self_attention(x, x, Modulation{&film.gamma[l], &film.beta[l]}, &mask);
    x = layer.norm1(ad::add(x, att.value));
    x = layer.norm2(ad::add(x, layer.feed_forward(x)));
    out.attention.push_back(std::move(att.attention));
  }
  out.hidden = x;
  return out;
}

ad::Tensor readout_cls(const ad::Tensor& hidden) { return ad::reshape(ad::slice_rows(hidden, 0, 1), {hidden.cols()}); }

}  // namespace grat::attn
