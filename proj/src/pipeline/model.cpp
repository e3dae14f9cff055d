#include "grat/pipeline/model.hpp"

#include "grat/error.hpp"
#include "grat/graph/transform.hpp"

namespace grat::pipe {

GratModel::GratModel(RunConfig cfg, ModelSpec s) : config(std::move(cfg)), spec(std::move(s)) {
  config.check();
  Rng rng(config.seed);
  const std::size_t labels = spec.vocab.nodes.size();
  const std::size_t edge_types = spec.vocab.edges.size();
  const std::size_t width = config.encoder.width;

  encoder = attn::Encoder::create(store, "encoder", config.encoder, labels, edge_types, spec.node_feature_dim,
                                  spec.edge_feature_dim, rng);
  heads = dec::GenerationHeads::create(store, "heads", width, labels, config.pair_width, config.edge_hidden,
                                       spec.vocab.edges.class_count(), rng);
  if (config.task == Task::kTranslate) {
    decoder = dec::Decoder::create(store, "decoder", config.decoder, labels, edge_types, rng);
  }
  if (config.task == Task::kPretrain) {
    recovery = dec::PairHead::create(store, "recovery", width, config.pair_width, config.edge_hidden,
                                     spec.vocab.edges.class_count(), rng);
  }
  if (!spec.property_tasks.empty()) {
    property = obj::PropertyHead::create(store, "property", width, config.property_hidden, spec.property_tasks.size(),
                                         rng);
  }
  target_mean.assign(spec.property_tasks.size(), 0.0);
  target_std.assign(spec.property_tasks.size(), 1.0);
}

std::size_t GratModel::warm_start(const GratModel& other) {
  std::size_t copied = 0;
  for (const auto& [name, t] : other.store.items()) {
    if (!store.contains(name) || store.get(name).shape() != t.shape()) continue;
    store.assign(name, std::vector<double>(t.data().begin(), t.data().end()));
    ++copied;
  }
  return copied;
}

std::vector<double> GratModel::standardized_targets(const graph::Graph& g) const {
  std::vector<double> out;
  for (std::size_t t = 0; t < spec.property_tasks.size(); ++t) {
    const auto it = g.properties.find(spec.property_tasks[t]);
    if (it == g.properties.end()) throw ContractError("graph lacks property '" + spec.property_tasks[t] + "'");
    out.push_back((it->second - target_mean[t]) / target_std[t]);
  }
  return out;
}

std::vector<double> GratModel::predict_properties(const graph::Graph& g) const {
  if (!property) throw ContractError("model has no property head");
  const ad::Tensor raw = obj::predict_properties(encoder, *property, g);
  std::vector<double> out(raw.numel());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = raw[t] * target_std[t] + target_mean[t];
  return out;
}

std::vector<dec::GeneratedGraph> GratModel::generate(const std::vector<graph::Graph>& sources, std::size_t width,
                                                     std::size_t max_nodes) const {
  if (!decoder) throw ContractError("model has no decoder");
  const ad::Tensor memory = attn::encode(encoder, source_input(sources)).hidden;
  if (width == 1) return {dec::generate_greedy(*decoder, heads, memory, max_nodes)};
  return dec::generate_beam(*decoder, heads, memory, width, max_nodes);
}

graph::Graph source_input(const std::vector<graph::Graph>& sources) {
  if (sources.empty()) throw ContractError("no source graph");
  if (sources.size() == 1 && !sources[0].delimiter) return sources[0];
  std::vector<std::pair<graph::LabelId, graph::Graph>> parts;
  for (const graph::Graph& g : sources) parts.emplace_back(g.delimiter.value_or(graph::token::kReactant), g);
  return graph::concat_graphs(parts);
}

}  // namespace grat::pipe
