#include "grat/pipeline/config.hpp"

#include <fstream>
#include <set>

#include "grat/error.hpp"

namespace grat::pipe {

using nlohmann::json;

std::string task_name(Task t) {
  switch (t) {
    case Task::kProperty: return "property";
    case Task::kTranslate: return "translate";
    case Task::kPretrain: return "pretrain";
  }
  return "?";
}

Task parse_task(const std::string& name) {
  if (name == "property") return Task::kProperty;
  if (name == "translate") return Task::kTranslate;
  if (name == "pretrain") return Task::kPretrain;
  throw ContractError("unknown task '" + name + "'");
}

void RunConfig::check() const {
  encoder.check();
  decoder.check();
  if (encoder.width != decoder.width) throw ContractError("encoder and decoder widths differ");
  if (pair_width == 0 || edge_hidden == 0 || property_hidden == 0) throw ContractError("head sizes must be positive");
  if (batch_size == 0) throw ContractError("batch_size must be positive");
  if (beam_width == 0) throw ContractError("beam_width must be positive");
  if (max_nodes == 0) throw ContractError("max_nodes must be positive");
  if (!(mask_rate > 0.0 && mask_rate < 1.0)) throw ContractError("mask_rate must lie in (0, 1)");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ContractError("dropout must lie in [0, 1)");
  if (linear_decay && max_steps == 0) throw ContractError("linear_decay needs max_steps");
  if (!(clip_norm >= 0.0)) throw ContractError("clip_norm must be non-negative");
  if (!(optimizer.lr > 0.0)) throw ContractError("lr must be positive");
}

namespace {

void set_model(RunConfig& c, std::size_t layers, std::size_t heads, std::size_t width, std::size_t ff) {
  c.encoder.layers = c.decoder.layers = layers;
  c.encoder.heads = c.decoder.heads = heads;
  c.encoder.width = c.decoder.width = width;
  c.encoder.ff_width = c.decoder.ff_width = ff;
  c.pair_width = width / 2;
  c.edge_hidden = width;
  c.property_hidden = width;
}

}  // namespace

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "desk") {
    set_model(c, 2, 4, 64, 128);
    c.batch_size = 16;
  } else if (name == "paper-qm9") {
    set_model(c, 32, 32, 256, 1024);
    c.task = Task::kProperty;
    c.batch_size = 50;
  } else if (name == "paper-uspto") {
    set_model(c, 24, 8, 128, 256);
    c.encoder.use_positional_encoding = true;
    c.batch_size = 128;
    c.beam_width = 8;
  } else {
    throw ContractError("unknown preset '" + name + "'");
  }
  return c;
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_encoder(const json& j, attn::EncoderConfig& e) {
  static const std::set<std::string> keys{"layers", "heads", "width", "ff_width", "conditioner_width",
                                          "positional_encoding", "neighbor_only", "max_context"};
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw ContractError("unknown encoder key '" + k + "'");
  }
  read(j, "layers", e.layers);
  read(j, "heads", e.heads);
  read(j, "width", e.width);
  read(j, "ff_width", e.ff_width);
  read(j, "conditioner_width", e.conditioner_width);
  read(j, "positional_encoding", e.use_positional_encoding);
  read(j, "neighbor_only", e.neighbor_only);
  read(j, "max_context", e.max_context);
}

void read_decoder(const json& j, dec::DecoderConfig& d) {
  static const std::set<std::string> keys{"layers", "heads", "width", "ff_width", "conditioner_width",
                                          "positional_encoding", "max_context"};
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw ContractError("unknown decoder key '" + k + "'");
  }
  read(j, "layers", d.layers);
  read(j, "heads", d.heads);
  read(j, "width", d.width);
  read(j, "ff_width", d.ff_width);
  read(j, "conditioner_width", d.conditioner_width);
  read(j, "positional_encoding", d.use_positional_encoding);
  read(j, "max_context", d.max_context);
}

}  // namespace

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ContractError("config must be a JSON object");
  static const std::set<std::string> keys{
      "preset",         "task",        "encoder",     "decoder",     "pair_width",      "edge_hidden",
      "property_hidden", "train_data", "valid_data",  "test_data",   "node_labels",     "edge_types",
      "property_tasks", "lr",          "beta1",       "beta2",       "eps",             "warmup_steps",
      "seed",           "epochs",      "max_steps",   "batch_size",  "patience",        "beam_width",
      "max_nodes",      "mask_rate",   "dropout",     "weight_decay", "linear_decay", "clip_norm",
      "augment_permutations",   "init_checkpoint", "checkpoint_out", "metrics_out"};
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw ContractError("unknown config key '" + k + "'");
  }
  try {
    RunConfig c = preset(j.value("preset", std::string("desk")));
    if (j.contains("task")) c.task = parse_task(j.at("task").get<std::string>());
    if (j.contains("encoder")) read_encoder(j.at("encoder"), c.encoder);
    if (j.contains("decoder")) read_decoder(j.at("decoder"), c.decoder);
    read(j, "pair_width", c.pair_width);
    read(j, "edge_hidden", c.edge_hidden);
    read(j, "property_hidden", c.property_hidden);
    read(j, "train_data", c.train_data);
    read(j, "valid_data", c.valid_data);
    read(j, "test_data", c.test_data);
    read(j, "node_labels", c.node_labels);
    read(j, "edge_types", c.edge_types);
    read(j, "property_tasks", c.property_tasks);
    read(j, "lr", c.optimizer.lr);
    read(j, "beta1", c.optimizer.beta1);
    read(j, "beta2", c.optimizer.beta2);
    read(j, "eps", c.optimizer.eps);
    read(j, "warmup_steps", c.warmup_steps);
    read(j, "weight_decay", c.optimizer.weight_decay);
    read(j, "linear_decay", c.linear_decay);
    read(j, "clip_norm", c.clip_norm);
    read(j, "augment_permutations", c.augment_permutations);
    read(j, "seed", c.seed);
    read(j, "epochs", c.epochs);
    read(j, "max_steps", c.max_steps);
    read(j, "batch_size", c.batch_size);
    read(j, "patience", c.patience);
    read(j, "beam_width", c.beam_width);
    read(j, "max_nodes", c.max_nodes);
    read(j, "mask_rate", c.mask_rate);
    read(j, "dropout", c.dropout);
    read(j, "init_checkpoint", c.init_checkpoint);
    read(j, "checkpoint_out", c.checkpoint_out);
    read(j, "metrics_out", c.metrics_out);
    c.check();
    return c;
  } catch (const json::exception& e) {
    throw ContractError(std::string("config: ") + e.what());
  }
}

json config_to_json(const RunConfig& c) {
  const auto& e = c.encoder;
  const auto& d = c.decoder;
  return json{
      {"preset", c.preset},
      {"task", task_name(c.task)},
      {"encoder",
       {{"layers", e.layers}, {"heads", e.heads}, {"width", e.width}, {"ff_width", e.ff_width},
        {"conditioner_width", e.conditioner_width}, {"positional_encoding", e.use_positional_encoding},
        {"neighbor_only", e.neighbor_only}, {"max_context", e.max_context}}},
      {"decoder",
       {{"layers", d.layers}, {"heads", d.heads}, {"width", d.width}, {"ff_width", d.ff_width},
        {"conditioner_width", d.conditioner_width}, {"positional_encoding", d.use_positional_encoding},
        {"max_context", d.max_context}}},
      {"pair_width", c.pair_width},
      {"edge_hidden", c.edge_hidden},
      {"property_hidden", c.property_hidden},
      {"train_data", c.train_data},
      {"valid_data", c.valid_data},
      {"test_data", c.test_data},
      {"node_labels", c.node_labels},
      {"edge_types", c.edge_types},
      {"property_tasks", c.property_tasks},
      {"lr", c.optimizer.lr},
      {"beta1", c.optimizer.beta1},
      {"beta2", c.optimizer.beta2},
      {"eps", c.optimizer.eps},
      {"warmup_steps", c.warmup_steps},
      {"weight_decay", c.optimizer.weight_decay},
      {"linear_decay", c.linear_decay},
      {"clip_norm", c.clip_norm},
      {"augment_permutations", c.augment_permutations},
      {"seed", c.seed},
      {"epochs", c.epochs},
      {"max_steps", c.max_steps},
      {"batch_size", c.batch_size},
      {"patience", c.patience},
      {"beam_width", c.beam_width},
      {"max_nodes", c.max_nodes},
      {"mask_rate", c.mask_rate},
      {"dropout", c.dropout},
      {"init_checkpoint", c.init_checkpoint},
      {"checkpoint_out", c.checkpoint_out},
      {"metrics_out", c.metrics_out},
  };
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "config", "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(0, "config", path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace grat::pipe
