#include "grat/objectives/losses.hpp"

#include <cmath>

#include "grat/error.hpp"
#include "grat/graph/transform.hpp"

namespace grat::obj {

double regression_loss(const std::map<std::string, double>& pred, const std::map<std::string, double>& target) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& [task, value] : pred) {
    const auto it = target.find(task);
    if (it == target.end()) continue;
    total += std::abs(value - it->second);
    ++count;
  }
  if (count == 0) throw ContractError("regression_loss: prediction and target share no task");
  return total / static_cast<double>(count);
}

ad::Tensor l1_loss(const ad::Tensor& pred, const std::vector<double>& target) {
  if (pred.numel() != target.size()) {
    throw DimensionError("l1_loss: " + std::to_string(pred.numel()) + " predictions for " +
                         std::to_string(target.size()) + " targets");
  }
  const ad::Tensor t(pred.shape(), target);
  return ad::mean(ad::abs(ad::sub(pred, t)));
}

PropertyHead PropertyHead::create(ad::ParamStore& store, const std::string& name, std::size_t width,
                                  std::size_t hidden_width, std::size_t tasks, Rng& rng) {
  return PropertyHead{attn::Linear::create(store, name + ".hidden", width, hidden_width, rng),
                      attn::Linear::create(store, name + ".out", hidden_width, tasks, rng)};
}

ad::Tensor PropertyHead::operator()(const ad::Tensor& readout) const {
  const ad::Tensor row = readout.rank() == 1 ? ad::reshape(readout, {1, readout.numel()}) : readout;
  return out(ad::relu(hidden(row)));
}

ad::Tensor predict_properties(const attn::Encoder& encoder, const PropertyHead& head, const graph::Graph& g) {
  const graph::Graph with_cls = graph::prepend_token(g, graph::token::kCls);
  return head(attn::readout_cls(attn::encode(encoder, with_cls).hidden));
}

TranslationLoss translation_loss(const attn::Encoder& encoder, const dec::Decoder& decoder,
                                 const dec::GenerationHeads& heads, const graph::Graph& source,
                                 const graph::Graph& target) {
  const ad::Tensor memory = attn::encode(encoder, source).hidden;
  const dec::DecoderBatch batch = dec::build_decoder_batch(target);
  const dec::DecoderLoss l = dec::decoder_loss(dec::decode_forward(decoder, heads, memory, batch), batch);
  return TranslationLoss{l.total, l.node, l.edge};
}

}  // namespace grat::obj
