#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "grat/graph/graph.hpp"

// JSON-lines graph format, one graph per line:
//   {"nodes":["C","N"],"edges":[[0,1,"single"]],"feat":[[..],..],"props":{"mu":0.5},"delim":"<REACTANT>"}
// Edge entries need i < j, the diagonal is implicit and omitted pairs are
// no-bond. "feat", "props" and "delim" are optional; other keys are rejected.
// Translation records pair graphs: {"src":[<graph>,...],"tgt":<graph>}.
namespace grat::graph {

struct Vocabularies {
  NodeLabelVocab nodes;
  EdgeTypeVocab edges;

  bool operator==(const Vocabularies&) const = default;
};

nlohmann::json graph_to_json(const Graph& g, const Vocabularies& vocab);
std::string serialize(const Graph& g, const Vocabularies& vocab);

/// Throws ParseError carrying `line_no` and the offending field.
Graph graph_from_json(const nlohmann::json& j, const Vocabularies& vocab, std::size_t line_no);
Graph parse_graph(std::string_view line, const Vocabularies& vocab, std::size_t line_no = 1);

struct TranslationPair {
  std::vector<Graph> sources;
  Graph target;

  bool operator==(const TranslationPair&) const = default;
};

std::string serialize_translation(const TranslationPair& pair, const Vocabularies& vocab);
TranslationPair parse_translation(std::string_view line, const Vocabularies& vocab, std::size_t line_no = 1);

/// Non-empty lines of a text file; throws ParseError when unreadable.
std::vector<std::string> read_lines(const std::string& path);
void write_lines(const std::string& path, const std::vector<std::string>& lines);

/// Builds closed vocabularies from the node and edge names used in the given
/// graph or translation lines, in first-appearance order.
Vocabularies scan_vocabularies(const std::vector<std::string>& lines);

}  // namespace grat::graph
