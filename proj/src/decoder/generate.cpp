#include "grat/decoder/generate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grat/error.hpp"

namespace grat::dec {

namespace {

using graph::Graph;

std::vector<double> log_softmax_row(const ad::Tensor& logits, std::size_t row) {
  const std::size_t c = logits.cols();
  std::vector<double> out(c);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < c; ++j) top = std::max(top, logits.at(row, j));
  double total = 0.0;
  for (std::size_t j = 0; j < c; ++j) total += std::exp(logits.at(row, j) - top);
  const double norm = top + std::log(total);
  for (std::size_t j = 0; j < c; ++j) out[j] = logits.at(row, j) - norm;
  return out;
}

// Scores for one pending step of a partial graph.
struct StepScores {
  std::vector<double> labels;              // log-softmax over the whole vocabulary
  std::vector<std::vector<double>> edges;  // per earlier node, log-softmax over classes
};

StepScores score_step(const Decoder& decoder, const GenerationHeads& heads, const ad::Tensor& encoder_hidden,
                      const Graph& partial) {
  const DecoderBatch batch = build_prefix_batch(partial);
  const DecodeOutput out = decode_forward(decoder, heads, encoder_hidden, batch);
  StepScores s;
  s.labels = log_softmax_row(out.node_logits, batch.steps);
  for (std::size_t q = 0; q < batch.edge_queries.size(); ++q) s.edges.push_back(log_softmax_row(out.edge_logits, q));
  return s;
}

bool selectable(std::size_t label) {
  return label == graph::token::kEndOfGraph || label >= graph::token::kReservedCount;
}

// Candidate labels, best first; ties in id order.
std::vector<std::size_t> ranked_labels(const std::vector<double>& scores) {
  std::vector<std::size_t> ids;
  for (std::size_t l = 0; l < scores.size(); ++l) {
    if (selectable(l)) ids.push_back(l);
  }
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return ids;
}

struct EdgeChoice {
  double score = 0.0;
  std::vector<std::size_t> classes;
};

// The `keep` best joint edge assignments, merging one earlier node at a time.
std::vector<EdgeChoice> best_edges(const std::vector<std::vector<double>>& edges, std::size_t keep) {
  std::vector<EdgeChoice> current{EdgeChoice{}};
  for (const auto& row : edges) {
    std::vector<EdgeChoice> next;
    for (const EdgeChoice& c : current) {
      for (std::size_t cls = 0; cls < row.size(); ++cls) {
        EdgeChoice e = c;
        e.score += row[cls];
        e.classes.push_back(cls);
        next.push_back(std::move(e));
      }
    }
    std::stable_sort(next.begin(), next.end(),
                     [](const EdgeChoice& a, const EdgeChoice& b) { return a.score > b.score; });
    if (next.size() > keep) next.resize(keep);
    current = std::move(next);
  }
  return current;
}

Graph extend(const Graph& g, std::size_t label, const std::vector<std::size_t>& classes) {
  std::vector<graph::LabelId> labels = g.labels;
  labels.push_back(label);
  Graph out = Graph::with_labels(std::move(labels));
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) out.set_edge(i, j, g.edge(i, j));
  }
  const std::size_t k = g.size();
  for (std::size_t j = 0; j < k; ++j) out.set_edge(k, j, graph::EdgeTypeVocab::type_of_class(classes[j]));
  return out;
}

void sort_by_score(std::vector<GeneratedGraph>& v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const GeneratedGraph& a, const GeneratedGraph& b) { return a.score > b.score; });
}

}  // namespace

GeneratedGraph generate_greedy(const Decoder& decoder, const GenerationHeads& heads, const ad::Tensor& encoder_hidden,
                               std::size_t max_nodes) {
  if (max_nodes == 0) throw ContractError("generate: max_nodes must be at least 1");
  GeneratedGraph result;
  while (true) {
    if (result.graph.size() >= max_nodes) {
      result.truncated = true;
      return result;
    }
    const StepScores s = score_step(decoder, heads, encoder_hidden, result.graph);
    const std::size_t label = ranked_labels(s.labels).front();
    if (label == graph::token::kEndOfGraph) {
      result.score += s.labels[label];
      return result;
    }
    std::vector<std::size_t> classes;
    double edge_score = 0.0;
    for (const auto& row : s.edges) {
      const auto best = std::max_element(row.begin(), row.end());
      classes.push_back(static_cast<std::size_t>(best - row.begin()));
      edge_score += *best;
    }
    // Same summation order as the beam so width 1 agrees bit for bit.
    result.score = result.score + s.labels[label] + edge_score;
    result.graph = extend(result.graph, label, classes);
  }
}

std::vector<GeneratedGraph> generate_beam(const Decoder& decoder, const GenerationHeads& heads,
                                          const ad::Tensor& encoder_hidden, std::size_t width,
                                          std::size_t max_nodes) {
  if (width == 0) throw ContractError("generate_beam: width must be at least 1");
  if (max_nodes == 0) throw ContractError("generate: max_nodes must be at least 1");

  std::vector<GeneratedGraph> live{GeneratedGraph{}};
  std::vector<GeneratedGraph> finished;
  while (!live.empty()) {
    if (live.front().graph.size() >= max_nodes) {
      for (GeneratedGraph& h : live) {
        h.truncated = true;
        finished.push_back(std::move(h));
      }
      break;
    }
    std::vector<GeneratedGraph> candidates;
    for (const GeneratedGraph& h : live) {
      const StepScores s = score_step(decoder, heads, encoder_hidden, h.graph);
      std::vector<std::size_t> labels = ranked_labels(s.labels);
      if (labels.size() > width) labels.resize(width);
      std::vector<EdgeChoice> edge_options;
      for (std::size_t label : labels) {
        if (label == graph::token::kEndOfGraph) {
          finished.push_back(GeneratedGraph{h.graph, h.score + s.labels[label], false});
          continue;
        }
        if (edge_options.empty()) edge_options = best_edges(s.edges, width);
        for (const EdgeChoice& e : edge_options) {
          candidates.push_back(GeneratedGraph{extend(h.graph, label, e.classes), h.score + s.labels[label] + e.score,
                                              false});
        }
      }
    }
    sort_by_score(candidates);
    if (candidates.size() > width) candidates.resize(width);
    live = std::move(candidates);

    sort_by_score(finished);
    // Scores only fall, so no live hypothesis can enter a full finished list.
    if (finished.size() >= width && !live.empty() && live.front().score <= finished[width - 1].score) break;
  }
  sort_by_score(finished);
  if (finished.size() > width) finished.resize(width);
  return finished;
}

}  // namespace grat::dec
