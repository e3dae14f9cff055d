#include "grat/decoder/decoder.hpp"

#include "grat/error.hpp"

namespace grat::dec {

void DecoderConfig::check() const {
  if (layers == 0 || heads == 0 || width == 0 || ff_width == 0 || conditioner_width == 0 || max_context == 0) {
    throw ContractError("decoder sizes must be positive");
  }
  if (width % heads != 0) {
    throw ContractError("width " + std::to_string(width) + " is not divisible by " + std::to_string(heads) + " heads");
  }
}

GenerationHeads GenerationHeads::create(ad::ParamStore& store, const std::string& name, std::size_t width,
                                        std::size_t label_count, std::size_t pair_width, std::size_t edge_hidden,
                                        std::size_t edge_classes, Rng& rng) {
  return GenerationHeads{
      attn::Linear::create(store, name + ".label", width, label_count, rng),
      attn::Linear::create(store, name + ".pair_projection", width, pair_width, rng),
      attn::Linear::create(store, name + ".edge_hidden", 2 * pair_width, edge_hidden, rng),
      attn::Linear::create(store, name + ".edge_out", edge_hidden, edge_classes, rng),
  };
}

ad::Tensor GenerationHeads::edges(const ad::Tensor& left, const ad::Tensor& right) const {
  return edge_out(ad::relu(edge_hidden(ad::concat_cols({left, right}))));
}

PairHead PairHead::create(ad::ParamStore& store, const std::string& name, std::size_t width, std::size_t pair_width,
                          std::size_t hidden_width, std::size_t classes, Rng& rng) {
  return PairHead{
      attn::Linear::create(store, name + ".projection", width, pair_width, rng),
      attn::Linear::create(store, name + ".hidden", 2 * pair_width, hidden_width, rng),
      attn::Linear::create(store, name + ".out", hidden_width, classes, rng),
  };
}

ad::Tensor PairHead::operator()(const ad::Tensor& h, const std::vector<std::size_t>& left,
                                const std::vector<std::size_t>& right) const {
  const ad::Tensor p = projection(h);
  return out(ad::relu(hidden(ad::concat_cols({ad::gather_rows(p, left), ad::gather_rows(p, right)}))));
}

Decoder Decoder::create(ad::ParamStore& store, const std::string& name, const DecoderConfig& config,
                        std::size_t label_count, std::size_t edge_type_count, Rng& rng) {
  config.check();
  Decoder dec;
  dec.config = config;
  std::vector<double> table(label_count * config.width);
  for (double& x : table) x = rng.normal() * 0.1;
  dec.embedding = store.add(name + ".embedding", {label_count, config.width}, std::move(table));
  dec.conditioner = attn::EdgeConditioner::create(store, name + ".conditioner", edge_type_count, 0,
                                                  config.conditioner_width, config.layers, rng);
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::string prefix = name + ".layer" + std::to_string(l);
    dec.layers.push_back(DecoderLayer{
        attn::MultiHeadAttention::create(store, prefix + ".self", config.width, config.heads, rng),
        attn::LayerNormParams::create(store, prefix + ".norm1", config.width),
        attn::MultiHeadAttention::create(store, prefix + ".cross", config.width, config.heads, rng),
        attn::LayerNormParams::create(store, prefix + ".norm2", config.width),
        attn::FeedForward::create(store, prefix + ".ff", config.width, config.ff_width, rng),
        attn::LayerNormParams::create(store, prefix + ".norm3", config.width),
    });
  }
  return dec;
}

DecodeOutput decode_forward(const Decoder& decoder, const GenerationHeads& heads, const ad::Tensor& encoder_hidden,
                            const DecoderBatch& batch, DecodeOptions options) {
  const DecoderConfig& cfg = decoder.config;
  const std::size_t len = batch.length();
  if (len > cfg.max_context) {
    throw CapacityError("decoder sequence of " + std::to_string(len) + " tokens exceeds the context of " +
                        std::to_string(cfg.max_context));
  }
  if (encoder_hidden.cols() != cfg.width) throw DimensionError("decode_forward: encoder width differs from decoder");

  ad::Tensor x = ad::gather_rows(decoder.embedding, std::vector<std::size_t>(batch.tokens.begin(), batch.tokens.end()));
  if (cfg.use_positional_encoding) x = ad::add(x, attn::sinusoidal_encoding(len, cfg.width));
  if (options.input_offset) x = ad::add(x, *options.input_offset);
  x = attn::dropout(x);

  const attn::FilmStack film = attn::edge_gamma_beta(decoder.conditioner, batch.edge_types, len, len);

  DecodeOutput out;
  for (std::size_t l = 0; l < decoder.layers.size(); ++l) {
    const DecoderLayer& layer = decoder.layers[l];
    auto self = layer.self_attention(x, x, attn::Modulation{&film.gamma[l], &film.beta[l]}, &batch.mask);
    x = layer.norm1(ad::add(x, self.value));
    auto cross = layer.cross_attention(x, encoder_hidden, attn::Modulation{}, nullptr);
    x = layer.norm2(ad::add(x, cross.value));
    x = layer.norm3(ad::add(x, layer.feed_forward(x)));
    out.self_attention.push_back(std::move(self.attention));
  }
  out.hidden = x;

  std::vector<std::size_t> generate_rows;
  for (std::size_t s = 0; s <= batch.steps; ++s) generate_rows.push_back(DecoderBatch::generate_position(s));
  out.node_logits = heads.labels(ad::gather_rows(x, generate_rows));

  std::vector<std::size_t> left, right;
  for (const EdgeQuery& q : batch.edge_queries) {
    left.push_back(DecoderBatch::generate_position(q.step));
    right.push_back(DecoderBatch::node_position(q.node));
  }
  const ad::Tensor projected = heads.project(x);
  out.edge_logits = heads.edges(ad::gather_rows(projected, left), ad::gather_rows(projected, right));
  return out;
}

DecoderLoss decoder_loss(const DecodeOutput& out, const DecoderBatch& batch) {
  if (batch.node_targets.size() != out.node_logits.rows()) {
    throw ContractError("decoder_loss: batch carries no node targets");
  }
  DecoderLoss loss;
  loss.node = ad::cross_entropy(out.node_logits, batch.node_targets);
  loss.edge = ad::cross_entropy(out.edge_logits, batch.edge_targets);
  loss.total = ad::add(loss.node, loss.edge);
  return loss;
}

}  // namespace grat::dec
