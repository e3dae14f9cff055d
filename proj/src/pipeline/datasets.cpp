#include "grat/pipeline/datasets.hpp"

#include <algorithm>

#include "grat/error.hpp"

namespace grat::pipe {

using graph::Graph;

graph::Vocabularies synthetic_vocab(std::size_t labels, std::size_t edge_types) {
  std::vector<std::string> l, e;
  for (std::size_t i = 0; i < labels; ++i) l.push_back("L" + std::to_string(i));
  for (std::size_t i = 0; i < edge_types; ++i) e.push_back("e" + std::to_string(i));
  return {graph::NodeLabelVocab(l), graph::EdgeTypeVocab(e)};
}

Graph random_connected_graph(Rng& rng, std::size_t nodes, std::size_t labels, std::size_t edge_types,
                             double density) {
  std::vector<graph::LabelId> ids(nodes);
  for (auto& id : ids) id = graph::token::kReservedCount + rng.uniform_index(labels);
  Graph g = Graph::with_labels(std::move(ids));
  auto bond = [&] { return graph::edge::kReservedCount + rng.uniform_index(edge_types); };

  if (nodes == 2) {
    g.set_edge(1, 0, bond());
  } else if (nodes > 2) {
    std::vector<std::size_t> code(nodes - 2), degree(nodes, 1);
    for (auto& c : code) {
      c = rng.uniform_index(nodes);
      ++degree[c];
    }
    for (std::size_t c : code) {
      std::size_t leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      g.set_edge(leaf, c, bond());
      --degree[leaf];
      --degree[c];
    }
    std::size_t u = nodes, v = nodes;
    for (std::size_t i = 0; i < nodes; ++i) {
      if (degree[i] != 1) continue;
      (u == nodes ? u : v) = i;
    }
    g.set_edge(u, v, bond());
  }
  for (std::size_t i = 1; i < nodes; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (g.edge(i, j) != graph::edge::kNoBond) continue;
      if (rng.bernoulli(density)) g.set_edge(i, j, bond());
    }
  }
  return g;
}

namespace {

void check_options(const GraphGenOptions& opt) {
  if (opt.count == 0 || opt.max_nodes == 0 || opt.labels == 0 || opt.edge_types == 0) {
    throw ContractError("dataset sizes must be positive");
  }
  if (opt.min_nodes == 0 || opt.min_nodes > opt.max_nodes) throw ContractError("need 1 <= min_nodes <= max_nodes");
}

Graph draw(Rng& rng, const GraphGenOptions& opt) {
  const std::size_t n = opt.min_nodes + rng.uniform_index(opt.max_nodes - opt.min_nodes + 1);
  return random_connected_graph(rng, n, opt.labels, opt.edge_types, opt.density);
}

}  // namespace

TranslationDataset gen_copy_dataset(const GraphGenOptions& opt) {
  return gen_relabel_dataset(opt, [&] {
    check_options(opt);
    std::vector<std::size_t> id(opt.labels);
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
    return id;
  }());
}

TranslationDataset gen_relabel_dataset(const GraphGenOptions& opt, std::vector<std::size_t> perm) {
  check_options(opt);
  if (perm.empty()) {
    for (std::size_t i = 0; i < opt.labels; ++i) perm.push_back((i + 1) % opt.labels);
  }
  std::vector<std::size_t> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted.size() != opt.labels || sorted[i] != i) throw ContractError("relabel map is not a permutation");
  }
  TranslationDataset d{synthetic_vocab(opt.labels, opt.edge_types), {}};
  Rng rng(opt.seed);
  for (std::size_t k = 0; k < opt.count; ++k) {
    Graph src = draw(rng, opt);
    Graph tgt = src;
    for (auto& l : tgt.labels) l = graph::token::kReservedCount + perm[l - graph::token::kReservedCount];
    d.pairs.push_back({{std::move(src)}, std::move(tgt)});
  }
  return d;
}

double label_weight(std::size_t label_index) {
  static const double table[] = {1.0, -0.5, 2.0, 0.25, -1.5, 1.25, 0.75, -0.25};
  return table[label_index % 8] + 0.1 * static_cast<double>(label_index / 8);
}

std::size_t triangle_count(const Graph& g) {
  const std::size_t n = g.size();
  std::size_t count = 0;
  auto bonded = [&](std::size_t a, std::size_t b) { return g.edge(a, b) >= graph::edge::kReservedCount; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!bonded(i, j)) continue;
      for (std::size_t k = j + 1; k < n; ++k) count += bonded(i, k) && bonded(j, k);
    }
  return count;
}

PropertyDataset gen_property_dataset(const GraphGenOptions& opt) {
  check_options(opt);
  PropertyDataset d{synthetic_vocab(opt.labels, opt.edge_types), {}};
  Rng rng(opt.seed);
  for (std::size_t k = 0; k < opt.count; ++k) {
    Graph g = draw(rng, opt);
    double t1 = 0.0;
    for (auto l : g.labels) t1 += label_weight(l - graph::token::kReservedCount);
    g.properties["t1"] = t1;
    g.properties["t2"] = static_cast<double>(triangle_count(g));
    d.graphs.push_back(std::move(g));
  }
  return d;
}

std::vector<std::string> serialize_dataset(const TranslationDataset& d) {
  std::vector<std::string> lines;
  for (const auto& p : d.pairs) lines.push_back(graph::serialize_translation(p, d.vocab));
  return lines;
}

std::vector<std::string> serialize_dataset(const PropertyDataset& d) {
  std::vector<std::string> lines;
  for (const auto& g : d.graphs) lines.push_back(graph::serialize(g, d.vocab));
  return lines;
}

TranslationDataset load_translation(const std::string& path, const graph::Vocabularies* vocab) {
  const auto lines = graph::read_lines(path);
  TranslationDataset d{vocab ? *vocab : graph::scan_vocabularies(lines), {}};
  for (std::size_t i = 0; i < lines.size(); ++i) d.pairs.push_back(graph::parse_translation(lines[i], d.vocab, i + 1));
  return d;
}

PropertyDataset load_property(const std::string& path, const graph::Vocabularies* vocab) {
  const auto lines = graph::read_lines(path);
  PropertyDataset d{vocab ? *vocab : graph::scan_vocabularies(lines), {}};
  for (std::size_t i = 0; i < lines.size(); ++i) d.graphs.push_back(graph::parse_graph(lines[i], d.vocab, i + 1));
  return d;
}

Split split_indices(std::size_t count, std::uint64_t seed) {
  Split s;
  for (std::size_t i = 0; i < count; ++i) {
    // splitmix64 of (seed, index)
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + i + 1;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    const std::uint64_t bucket = z % 10;
    if (bucket < 8) {
      s.train.push_back(i);
    } else if (bucket == 8) {
      s.valid.push_back(i);
    } else {
      s.test.push_back(i);
    }
  }
  return s;
}

}  // namespace grat::pipe
