#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "grat/graph/jsonl.hpp"
#include "grat/rng.hpp"

namespace grat::pipe {

struct TranslationDataset {
  graph::Vocabularies vocab;
  std::vector<graph::TranslationPair> pairs;
};

struct PropertyDataset {
  graph::Vocabularies vocab;
  std::vector<graph::Graph> graphs;
};

struct GraphGenOptions {
  std::size_t count = 200;
  std::size_t min_nodes = 1;
  std::size_t max_nodes = 8;
  std::size_t labels = 3;
  std::size_t edge_types = 2;
  double density = 0.3;
  std::uint64_t seed = 1;
};

/// Labels "L0".."L{n-1}", edge types "e0".."e{m-1}".
graph::Vocabularies synthetic_vocab(std::size_t labels, std::size_t edge_types);

/// Uniform spanning tree (random Pruefer code) over `nodes` nodes, plus each
/// remaining pair with probability `density`; labels and bond types uniform.
graph::Graph random_connected_graph(Rng& rng, std::size_t nodes, std::size_t labels, std::size_t edge_types,
                                    double density);

/// Target = source. Throws ContractError on non-positive sizes.
TranslationDataset gen_copy_dataset(const GraphGenOptions& opt);

/// Target labels are `perm` applied to the source labels (user label index
/// i becomes perm[i]); empty `perm` means the shift i -> i+1 mod n.
TranslationDataset gen_relabel_dataset(const GraphGenOptions& opt, std::vector<std::size_t> perm = {});

/// Per-label weight of the additive property t1.
double label_weight(std::size_t label_index);
std::size_t triangle_count(const graph::Graph& g);

/// Random graphs carrying t1 = sum of label weights and t2 = triangle count.
PropertyDataset gen_property_dataset(const GraphGenOptions& opt);

std::vector<std::string> serialize_dataset(const TranslationDataset& d);
std::vector<std::string> serialize_dataset(const PropertyDataset& d);

/// Loads JSONL files. Without `vocab` the vocabularies are scanned from the
/// lines themselves.
TranslationDataset load_translation(const std::string& path, const graph::Vocabularies* vocab = nullptr);
PropertyDataset load_property(const std::string& path, const graph::Vocabularies* vocab = nullptr);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

/// 80/10/10 split of 0..count-1 by a seeded hash of the line index.
Split split_indices(std::size_t count, std::uint64_t seed);

}  // namespace grat::pipe
