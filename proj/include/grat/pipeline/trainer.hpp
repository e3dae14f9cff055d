#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "grat/objectives/metrics.hpp"
#include "grat/pipeline/datasets.hpp"
#include "grat/pipeline/model.hpp"

namespace grat::pipe {

/// Train/valid/test material for one run. Translation runs fill the pair
/// lists, property and pretraining runs the graph lists.
struct TrainData {
  graph::Vocabularies vocab;
  std::vector<graph::TranslationPair> train_pairs, valid_pairs, test_pairs;
  std::vector<graph::Graph> train_graphs, valid_graphs, test_graphs;
};

/// Reads the configured files; a lone train file is split 80/10/10.
TrainData load_train_data(const RunConfig& config);
/// Vocabularies come from the config when given there, otherwise from the data.
ModelSpec model_spec(const RunConfig& config, const TrainData& data);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double valid_loss = 0.0;  // NaN without a validation split
  std::size_t steps = 0;    // cumulative
};

struct TrainHooks {
  std::function<void(const std::string&)> log;
  /// Called before every optimizer step (fault injection in tests).
  std::function<void(GratModel&, std::size_t step)> before_step;
};

struct TrainResult {
  GratModel model;
  ad::AdamState adam;
  std::vector<EpochRecord> epochs;
  std::vector<double> step_losses;
  std::size_t steps = 0;
  bool stopped_early = false;
  /// Set when a loss or gradient went non-finite; the model then holds the
  /// parameters of the last good step.
  bool numeric_failure = false;
  std::string failure;
  std::map<std::string, obj::MetricReport> metrics;  // by split name
};

/// Shuffled mini-batch Adam training with early stopping on validation loss
/// (best parameters restored). `init`, when given, supplies starting weights
/// for every parameter it shares with the new model.
TrainResult train(const RunConfig& config, const TrainData& data, const GratModel* init = nullptr,
                  const TrainHooks& hooks = {});

/// Per-sample losses, without gradient tracking.
double mean_loss(const GratModel& model, const std::vector<graph::TranslationPair>& pairs,
                 const std::vector<graph::Graph>& graphs);

/// Worker count for evaluation: GRAT_THREADS if set, else hardware threads.
std::size_t evaluation_threads();

/// Top-1 exact-match of generated targets.
obj::MetricReport evaluate_translation(const GratModel& model, const std::vector<graph::TranslationPair>& pairs,
                                       std::size_t beam_width, std::size_t max_nodes, std::size_t threads = 0);
/// Per-task MAE in original units plus stdMAE (train-split sigma) and
/// logMAE when every MAE is positive.
obj::MetricReport evaluate_property(const GratModel& model, const std::vector<graph::Graph>& graphs,
                                    std::size_t threads = 0);

}  // namespace grat::pipe
