// grat: train, evaluate and run graph-to-graph transformer models.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "grat/error.hpp"
#include "grat/graph/transform.hpp"
#include "grat/pipeline/attention_dump.hpp"
#include "grat/pipeline/checkpoint.hpp"
#include "grat/pipeline/trainer.hpp"
#include "grat/smiles/smiles_lite.hpp"

using namespace grat;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kNumeric = 3;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError(0, "output", "cannot write " + path);
  out << text;
}

void write_metrics(const std::string& path, const json& j) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text(path, j.dump(2) + "\n");
  }
}

json metrics_json(const std::map<std::string, obj::MetricReport>& m) {
  json j = json::object();
  for (const auto& [split, r] : m) j[split] = r.to_json();
  return j;
}

struct TrainArgs {
  std::string config;
  std::string checkpoint_out;
  std::string metrics_out;
  long epochs = -1;
  long max_steps = -1;
  bool quiet = false;
};

int run_train(const TrainArgs& a, bool pretrain) {
  pipe::RunConfig cfg = pipe::load_config(a.config);
  if (pretrain) cfg.task = pipe::Task::kPretrain;
  if (!a.checkpoint_out.empty()) cfg.checkpoint_out = a.checkpoint_out;
  if (!a.metrics_out.empty()) cfg.metrics_out = a.metrics_out;
  if (a.epochs >= 0) cfg.epochs = static_cast<std::size_t>(a.epochs);
  if (a.max_steps >= 0) cfg.max_steps = static_cast<std::size_t>(a.max_steps);

  const pipe::TrainData data = pipe::load_train_data(cfg);
  std::optional<pipe::GratModel> init;
  if (!cfg.init_checkpoint.empty()) init = pipe::model_from_checkpoint(pipe::load_checkpoint(cfg.init_checkpoint));

  pipe::TrainHooks hooks;
  if (!a.quiet) hooks.log = [](const std::string& s) { std::cerr << s << "\n"; };
  pipe::TrainResult r = pipe::train(cfg, data, init ? &*init : nullptr, hooks);
  pipe::save_checkpoint(cfg.checkpoint_out, r.model, &r.adam);

  json metrics = metrics_json(r.metrics);
  metrics["steps"] = r.steps;
  metrics["epochs"] = r.epochs.size();
  metrics["stopped_early"] = r.stopped_early;
  if (r.numeric_failure) {
    metrics["failure"] = r.failure;
    write_metrics(cfg.metrics_out, metrics);
    std::cerr << "error: " << r.failure << " (last good checkpoint kept in " << cfg.checkpoint_out << ")\n";
    return kNumeric;
  }
  write_metrics(cfg.metrics_out, metrics);
  return kOk;
}

struct EvalArgs {
  std::string ckpt;
  std::string data;
  std::string metrics_out;
  std::size_t beam = 0;
  std::size_t max_nodes = 0;
};

int run_eval(const EvalArgs& a) {
  const pipe::GratModel model = pipe::model_from_checkpoint(pipe::load_checkpoint(a.ckpt));
  const pipe::RunConfig& cfg = model.config;
  obj::MetricReport r;
  if (cfg.task == pipe::Task::kTranslate) {
    const auto ds = pipe::load_translation(a.data, &model.spec.vocab);
    r = pipe::evaluate_translation(model, ds.pairs, a.beam ? a.beam : cfg.beam_width,
                                   a.max_nodes ? a.max_nodes : cfg.max_nodes);
    r.loss = pipe::mean_loss(model, ds.pairs, {});
  } else {
    const auto ds = pipe::load_property(a.data, &model.spec.vocab);
    if (cfg.task == pipe::Task::kProperty) r = pipe::evaluate_property(model, ds.graphs);
    r.count = ds.graphs.size();
    r.loss = pipe::mean_loss(model, {}, ds.graphs);
  }
  write_metrics(a.metrics_out, r.to_json());
  return kOk;
}

struct GenerateArgs {
  std::string ckpt;
  std::string src;
  std::size_t beam = 8;
  std::size_t max_nodes = 32;
  std::string format = "json";
};

// One source per line: a graph, a translation record (its "src" is used) or,
// in smiles format, dot-separated SMILES.
std::vector<graph::Graph> parse_sources(const std::string& line, std::size_t line_no, const pipe::GratModel& m,
                                        bool smiles) {
  const graph::Vocabularies& vocab = m.spec.vocab;
  if (smiles) {
    std::vector<graph::Graph> out;
    std::stringstream ss(line);
    std::string part;
    while (std::getline(ss, part, '.')) {
      try {
        graph::Graph g = smiles::parse_smiles_lite(part, vocab);
        g.delimiter = graph::token::kReactant;
        out.push_back(std::move(g));
      } catch (const smiles::SmilesError& e) {
        throw ParseError(line_no, "smiles", e.what());
      }
    }
    if (out.size() == 1) out[0].delimiter.reset();
    return out;
  }
  const json j = json::parse(line, nullptr, false);
  if (j.is_object() && j.contains("src")) return graph::parse_translation(line, vocab, line_no).sources;
  return {graph::parse_graph(line, vocab, line_no)};
}

int run_generate(const GenerateArgs& a) {
  const pipe::GratModel model = pipe::model_from_checkpoint(pipe::load_checkpoint(a.ckpt));
  const bool smiles = a.format == "smiles";
  const auto lines = graph::read_lines(a.src);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto sources = parse_sources(lines[i], i + 1, model, smiles);
    const auto results = model.generate(sources, a.beam, a.max_nodes);
    for (std::size_t rank = 0; rank < results.size(); ++rank) {
      const auto& r = results[rank];
      if (smiles) {
        std::string text;
        try {
          text = r.graph.empty() ? "" : smiles::write_smiles_lite(r.graph, model.spec.vocab);
        } catch (const smiles::UnsupportedGraphError& e) {
          text = std::string("!") + e.what();
        }
        std::printf("%zu\t%zu\t%.6f\t%s%s\n", i + 1, rank + 1, r.score, text.c_str(), r.truncated ? "\t(truncated)" : "");
      } else {
        const json out{{"source", i + 1},
                       {"rank", rank + 1},
                       {"score", r.score},
                       {"truncated", r.truncated},
                       {"graph", graph::graph_to_json(r.graph, model.spec.vocab)}};
        std::cout << out.dump() << "\n";
      }
    }
  }
  return kOk;
}

struct DumpArgs {
  std::string ckpt;
  std::string graph;
  std::string out;
  std::size_t layer = 1;
  long head = -1;
  std::size_t line = 1;
};

int run_dump(const DumpArgs& a) {
  const pipe::GratModel model = pipe::model_from_checkpoint(pipe::load_checkpoint(a.ckpt));
  const auto lines = graph::read_lines(a.graph);
  if (a.line == 0 || a.line > lines.size()) throw ParseError(a.line, "line", "graph file has no such line");
  graph::Graph g = parse_sources(lines[a.line - 1], a.line, model, false).front();
  if (model.config.task == pipe::Task::kProperty || model.config.task == pipe::Task::kPretrain) {
    g = graph::prepend_token(g, graph::token::kCls);
  }
  std::optional<std::size_t> head;
  if (a.head >= 0) head = static_cast<std::size_t>(a.head);
  const std::string csv = pipe::attention_csv(pipe::attention_matrix(model, g, a.layer, head));
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    write_text(a.out, csv);
  }
  return kOk;
}

struct GenDataArgs {
  std::string kind;
  std::string out;
  pipe::GraphGenOptions opt;
  std::vector<std::size_t> perm;
};

int run_gen_data(const GenDataArgs& a) {
  std::vector<std::string> lines;
  if (a.kind == "copy") {
    lines = pipe::serialize_dataset(pipe::gen_copy_dataset(a.opt));
  } else if (a.kind == "relabel") {
    lines = pipe::serialize_dataset(pipe::gen_relabel_dataset(a.opt, a.perm));
  } else {
    lines = pipe::serialize_dataset(pipe::gen_property_dataset(a.opt));
  }
  graph::write_lines(a.out, lines);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-to-graph transformer"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto add_train = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", train_args.config, "run config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--checkpoint-out", train_args.checkpoint_out, "override checkpoint path");
    cmd->add_option("--metrics-out", train_args.metrics_out, "override metrics path");
    cmd->add_option("--epochs", train_args.epochs, "override epoch count");
    cmd->add_option("--max-steps", train_args.max_steps, "override optimizer step cap");
    cmd->add_flag("--quiet", train_args.quiet, "no per-epoch log");
    return cmd;
  };
  auto* train = add_train("train", "train a model");
  auto* pretrain = add_train("pretrain", "masked-graph pretraining");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--ckpt", eval_args.ckpt)->required()->check(CLI::ExistingFile);
  eval->add_option("--data", eval_args.data)->required()->check(CLI::ExistingFile);
  eval->add_option("--metrics-out", eval_args.metrics_out);
  eval->add_option("--beam", eval_args.beam, "beam width (default from config)");
  eval->add_option("--max-nodes", eval_args.max_nodes);

  GenerateArgs gen_args;
  auto* generate = app.add_subcommand("generate", "generate target graphs");
  generate->add_option("--ckpt", gen_args.ckpt)->required()->check(CLI::ExistingFile);
  generate->add_option("--src", gen_args.src)->required()->check(CLI::ExistingFile);
  generate->add_option("--beam", gen_args.beam)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--max-nodes", gen_args.max_nodes)->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--format", gen_args.format)->capture_default_str()->check(CLI::IsMember({"json", "smiles"}));

  DumpArgs dump_args;
  auto* dump = app.add_subcommand("dump-attention", "write encoder attention weights as CSV");
  dump->add_option("--ckpt", dump_args.ckpt)->required()->check(CLI::ExistingFile);
  dump->add_option("--graph", dump_args.graph)->required()->check(CLI::ExistingFile);
  dump->add_option("--layer", dump_args.layer, "1-based layer")->capture_default_str();
  dump->add_option("--head", dump_args.head, "0-based head (default: mean over heads)");
  dump->add_option("--line", dump_args.line, "1-based line of the graph file")->capture_default_str();
  dump->add_option("--out", dump_args.out);

  GenDataArgs data_args;
  auto* gen_data = app.add_subcommand("gen-data", "write a synthetic dataset");
  gen_data->add_option("kind", data_args.kind)->required()->check(CLI::IsMember({"copy", "relabel", "property"}));
  gen_data->add_option("--out", data_args.out)->required();
  gen_data->add_option("--seed", data_args.opt.seed)->capture_default_str();
  gen_data->add_option("--count", data_args.opt.count)->capture_default_str();
  gen_data->add_option("--min-nodes", data_args.opt.min_nodes)->capture_default_str();
  gen_data->add_option("--max-nodes", data_args.opt.max_nodes)->capture_default_str();
  gen_data->add_option("--labels", data_args.opt.labels)->capture_default_str();
  gen_data->add_option("--edge-types", data_args.opt.edge_types)->capture_default_str();
  gen_data->add_option("--density", data_args.opt.density)->capture_default_str();
  gen_data->add_option("--perm", data_args.perm, "relabel map, label i -> perm[i]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return run_train(train_args, false);
    if (*pretrain) return run_train(train_args, true);
    if (*eval) return run_eval(eval_args);
    if (*generate) return run_generate(gen_args);
    if (*dump) return run_dump(dump_args);
    if (*gen_data) return run_gen_data(data_args);
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}
