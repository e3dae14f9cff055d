#include "grat/graph/jsonl.hpp"

#include <fstream>
#include <set>

#include "grat/error.hpp"

namespace grat::graph {

using nlohmann::json;

json graph_to_json(const Graph& g, const Vocabularies& vocab) {
  json j;
  json nodes = json::array();
  for (LabelId id : g.labels) nodes.push_back(vocab.nodes.name(id));
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = a + 1; b < g.size(); ++b)
      if (g.edge(a, b) != edge::kNoBond) edges.push_back(json::array({a, b, vocab.edges.name(g.edge(a, b))}));
  j["edges"] = std::move(edges);
  if (g.node_feature_dim > 0) {
    json feat = json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < g.node_feature_dim; ++k) row.push_back(g.node_feature(i, k));
      feat.push_back(std::move(row));
    }
    j["feat"] = std::move(feat);
  }
  if (!g.properties.empty()) j["props"] = g.properties;
  if (g.delimiter) j["delim"] = vocab.nodes.name(*g.delimiter);
  return j;
}

std::string serialize(const Graph& g, const Vocabularies& vocab) { return graph_to_json(g, vocab).dump(); }

namespace {

std::size_t as_index(const json& v, std::size_t line_no, const char* field) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(line_no, field, "expected a non-negative integer, got " + v.dump());
  }
  return v.get<std::size_t>();
}

}  // namespace

Graph graph_from_json(const json& j, const Vocabularies& vocab, std::size_t line_no) {
  if (!j.is_object()) throw ParseError(line_no, "", "graph must be a JSON object");
  static const std::set<std::string> known{"nodes", "edges", "feat", "props", "delim"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw ParseError(line_no, item.key(), "unknown key");
  }
  if (!j.contains("nodes") || !j["nodes"].is_array()) throw ParseError(line_no, "nodes", "missing node list");
  if (!j.contains("edges") || !j["edges"].is_array()) throw ParseError(line_no, "edges", "missing edge list");

  std::vector<LabelId> labels;
  bool special = false;
  for (const json& name : j["nodes"]) {
    if (!name.is_string()) throw ParseError(line_no, "nodes", "node labels must be strings");
    auto id = vocab.nodes.find(name.get<std::string>());
    if (!id) throw ParseError(line_no, "nodes", "unknown label '" + name.get<std::string>() + "'");
    special = special || vocab.nodes.is_reserved(*id);
    labels.push_back(*id);
  }
  Graph g = Graph::with_labels(std::move(labels));
  g.augmented = special;
  const std::size_t n = g.size();

  for (const json& e : j["edges"]) {
    if (!e.is_array() || e.size() != 3 || !e[2].is_string()) {
      throw ParseError(line_no, "edges", "edge entries are [i, j, \"type\"], got " + e.dump());
    }
    const std::size_t a = as_index(e[0], line_no, "edges");
    const std::size_t b = as_index(e[1], line_no, "edges");
    if (a >= b) throw ParseError(line_no, "edges", "edge " + e.dump() + " needs i < j");
    if (b >= n) throw ParseError(line_no, "edges", "edge " + e.dump() + " refers to a missing node");
    const std::string name = e[2].get<std::string>();
    auto type = vocab.edges.find(name);
    if (!type) throw ParseError(line_no, "edges", "unknown edge type '" + name + "'");
    if (g.edge(a, b) != edge::kNoBond) throw ParseError(line_no, "edges", "pair listed twice: " + e.dump());
    g.set_edge(a, b, *type);
  }

  if (j.contains("feat")) {
    const json& feat = j["feat"];
    if (!feat.is_array() || feat.size() != n) throw ParseError(line_no, "feat", "need one feature row per node");
    const std::size_t width = n ? feat[0].size() : 0;
    g.node_feature_dim = width;
    for (const json& row : feat) {
      if (!row.is_array() || row.size() != width) throw ParseError(line_no, "feat", "ragged feature rows");
      for (const json& x : row) {
        if (!x.is_number()) throw ParseError(line_no, "feat", "features must be numbers");
        g.node_features.push_back(x.get<double>());
      }
    }
  }
  if (j.contains("props")) {
    if (!j["props"].is_object()) throw ParseError(line_no, "props", "expected an object");
    for (const auto& item : j["props"].items()) {
      if (!item.value().is_number()) throw ParseError(line_no, "props", "property '" + item.key() + "' is not a number");
      g.properties[item.key()] = item.value().get<double>();
    }
  }
  if (j.contains("delim")) {
    if (!j["delim"].is_string()) throw ParseError(line_no, "delim", "expected a token name");
    auto id = vocab.nodes.find(j["delim"].get<std::string>());
    if (!id || !NodeLabelVocab::is_delimiter(*id)) {
      throw ParseError(line_no, "delim", "'" + j["delim"].get<std::string>() + "' is not a delimiter token");
    }
    g.delimiter = *id;
  }

  const auto violations = validate(g);
  if (!violations.empty()) throw ParseError(line_no, "edges", violations.front().message);
  return g;
}

Graph parse_graph(std::string_view line, const Vocabularies& vocab, std::size_t line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ParseError(line_no, "", "malformed JSON");
  return graph_from_json(j, vocab, line_no);
}

std::string serialize_translation(const TranslationPair& pair, const Vocabularies& vocab) {
  json j;
  json src = json::array();
  for (const Graph& g : pair.sources) src.push_back(graph_to_json(g, vocab));
  j["src"] = std::move(src);
  j["tgt"] = graph_to_json(pair.target, vocab);
  return j.dump();
}

TranslationPair parse_translation(std::string_view line, const Vocabularies& vocab, std::size_t line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ParseError(line_no, "", "malformed JSON");
  if (!j.is_object()) throw ParseError(line_no, "", "translation record must be an object");
  for (const auto& item : j.items()) {
    if (item.key() != "src" && item.key() != "tgt") throw ParseError(line_no, item.key(), "unknown key");
  }
  if (!j.contains("src") || !j["src"].is_array() || j["src"].empty()) {
    throw ParseError(line_no, "src", "need a non-empty list of source graphs");
  }
  if (!j.contains("tgt")) throw ParseError(line_no, "tgt", "missing target graph");
  TranslationPair pair;
  for (const json& g : j["src"]) pair.sources.push_back(graph_from_json(g, vocab, line_no));
  pair.target = graph_from_json(j["tgt"], vocab, line_no);
  return pair;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "", "cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(line);
  }
  return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(0, "", "cannot write '" + path + "'");
  for (const std::string& line : lines) out << line << '\n';
}

namespace {

void scan_graph(const json& g, std::vector<std::string>& labels, std::set<std::string>& seen_labels,
                std::vector<std::string>& edges, std::set<std::string>& seen_edges, const Vocabularies& reserved) {
  if (g.contains("nodes") && g["nodes"].is_array()) {
    for (const json& name : g["nodes"]) {
      if (!name.is_string()) continue;
      const std::string s = name.get<std::string>();
      if (reserved.nodes.find(s)) continue;
      if (seen_labels.insert(s).second) labels.push_back(s);
    }
  }
  if (g.contains("edges") && g["edges"].is_array()) {
    for (const json& e : g["edges"]) {
      if (!e.is_array() || e.size() != 3 || !e[2].is_string()) continue;
      const std::string s = e[2].get<std::string>();
      if (reserved.edges.find(s)) continue;
      if (seen_edges.insert(s).second) edges.push_back(s);
    }
  }
}

}  // namespace

Vocabularies scan_vocabularies(const std::vector<std::string>& lines) {
  const Vocabularies reserved{NodeLabelVocab(), EdgeTypeVocab()};
  std::vector<std::string> labels, edges;
  std::set<std::string> seen_labels, seen_edges;
  std::size_t line_no = 0;
  for (const std::string& line : lines) {
    ++line_no;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(line_no, "", "malformed JSON");
    if (j.contains("src")) {
      if (j["src"].is_array())
        for (const json& g : j["src"]) scan_graph(g, labels, seen_labels, edges, seen_edges, reserved);
      if (j.contains("tgt")) scan_graph(j["tgt"], labels, seen_labels, edges, seen_edges, reserved);
    } else {
      scan_graph(j, labels, seen_labels, edges, seen_edges, reserved);
    }
  }
  return Vocabularies{NodeLabelVocab(labels), EdgeTypeVocab(edges)};
}

}  // namespace grat::graph
