#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "grat/attention/encoder.hpp"
#include "grat/autodiff/adam.hpp"
#include "grat/decoder/decoder.hpp"

namespace grat::pipe {

enum class Task { kProperty, kTranslate, kPretrain };

std::string task_name(Task t);
Task parse_task(const std::string& name);

struct RunConfig {
  std::string preset = "desk";
  Task task = Task::kTranslate;

  attn::EncoderConfig encoder;
  dec::DecoderConfig decoder;
  std::size_t pair_width = 32;
  std::size_t edge_hidden = 64;
  std::size_t property_hidden = 64;

  // Data. Without valid/test files the train file is split 80/10/10.
  std::string train_data;
  std::string valid_data;
  std::string test_data;
  std::vector<std::string> node_labels;  // empty: scanned from the data
  std::vector<std::string> edge_types;
  std::vector<std::string> property_tasks;  // empty: every property of the first graph

  ad::AdamConfig optimizer;
  std::size_t warmup_steps = 0;  // linear warmup, 0 = constant lr
  bool linear_decay = false;     // lr falls linearly to 0 at max_steps
  double clip_norm = 0.0;        // global gradient norm cap, 0 = off
  /// Train translation on jointly node-permuted copies of each pair. Only
  /// valid when target node i corresponds to source node i.
  bool augment_permutations = false;
  std::uint64_t seed = 1;
  std::size_t epochs = 10;
  std::size_t max_steps = 0;  // 0 = no cap
  std::size_t batch_size = 16;
  std::size_t patience = 10;
  std::size_t beam_width = 8;
  std::size_t max_nodes = 32;
  double mask_rate = 0.15;
  double dropout = 0.0;  // training only; hurts small models

  std::string init_checkpoint;  // warm start from these weights
  std::string checkpoint_out = "model.ckpt";
  std::string metrics_out;

  /// Throws ContractError on inconsistent sizes.
  void check() const;
  bool operator==(const RunConfig&) const = default;
};

/// "desk", "paper-qm9" or "paper-uspto"; throws ContractError otherwise.
RunConfig preset(const std::string& name);

/// Preset named by "preset" (default desk) overlaid with the remaining keys.
/// Unknown keys throw ContractError.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::string& path);

}  // namespace grat::pipe
