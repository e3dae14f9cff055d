#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "grat/decoder/generate.hpp"
#include "grat/graph/jsonl.hpp"
#include "grat/objectives/losses.hpp"
#include "grat/pipeline/config.hpp"

namespace grat::pipe {

/// Everything besides the config that fixes parameter shapes.
struct ModelSpec {
  graph::Vocabularies vocab;
  std::vector<std::string> property_tasks;
  std::size_t node_feature_dim = 0;
  std::size_t edge_feature_dim = 0;

  bool operator==(const ModelSpec&) const = default;
};

/// Encoder plus the task-specific parts. The decoder exists for translation,
/// the recovery head for pretraining, the property head whenever there are
/// property tasks. Parameters live in `store`; the members hold handles into
/// it, so the model is move-only.
class GratModel {
 public:
  GratModel(RunConfig config, ModelSpec spec);
  GratModel(GratModel&&) = default;
  GratModel& operator=(GratModel&&) = default;
  GratModel(const GratModel&) = delete;
  GratModel& operator=(const GratModel&) = delete;

  RunConfig config;
  ModelSpec spec;
  // Property targets are learned standardized: (y - mean) / std per task.
  std::vector<double> target_mean;
  std::vector<double> target_std;

  ad::ParamStore store;
  attn::Encoder encoder;
  std::optional<dec::Decoder> decoder;
  dec::GenerationHeads heads;
  std::optional<dec::PairHead> recovery;
  std::optional<obj::PropertyHead> property;

  /// Copies every parameter whose name and shape match; returns the count.
  std::size_t warm_start(const GratModel& other);

  /// Standardized property targets of g, in task order. Throws
  /// ContractError if g lacks a task.
  std::vector<double> standardized_targets(const graph::Graph& g) const;
  /// Properties of g in original units.
  std::vector<double> predict_properties(const graph::Graph& g) const;

  std::vector<dec::GeneratedGraph> generate(const std::vector<graph::Graph>& sources, std::size_t width,
                                            std::size_t max_nodes) const;
};

/// Encoder input for one or more source graphs: a lone undelimited graph is
/// used as is, otherwise the parts are joined behind their delimiters
/// (<REACTANT> by default).
graph::Graph source_input(const std::vector<graph::Graph>& sources);

}  // namespace grat::pipe
