#include "grat/pipeline/attention_dump.hpp"

#include <cstdio>

#include "grat/error.hpp"

namespace grat::pipe {

AttentionMatrix attention_matrix(const GratModel& model, const graph::Graph& g, std::size_t layer,
                                 std::optional<std::size_t> head) {
  const std::size_t layers = model.encoder.layers.size();
  if (layer == 0 || layer > layers) {
    throw ContractError("layer " + std::to_string(layer) + " out of range 1.." + std::to_string(layers));
  }
  const attn::EncodeOutput out = attn::encode(model.encoder, g);
  const ad::AttentionResult& a = out.attention[layer - 1];
  if (head && *head >= a.heads) {
    throw ContractError("head " + std::to_string(*head) + " out of range 0.." + std::to_string(a.heads - 1));
  }
  const std::size_t n = g.size();
  AttentionMatrix m;
  for (auto id : g.labels) m.labels.push_back(model.spec.vocab.nodes.name(id));
  m.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (head) {
        m.values[i * n + j] = a.weight(*head, i, j);
        continue;
      }
      double s = 0.0;
      for (std::size_t h = 0; h < a.heads; ++h) s += a.weight(h, i, j);
      m.values[i * n + j] = s / static_cast<double>(a.heads);
    }
  }
  return m;
}

std::string attention_csv(const AttentionMatrix& m) {
  const std::size_t n = m.labels.size();
  std::string out;
  for (const auto& l : m.labels) out += "," + l;
  out += "\n";
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    out += m.labels[i];
    for (std::size_t j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", m.values[i * n + j]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace grat::pipe
