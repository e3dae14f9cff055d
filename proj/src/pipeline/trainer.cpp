#include "grat/pipeline/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

#include "grat/autodiff/tape.hpp"
#include "grat/error.hpp"
#include "grat/graph/transform.hpp"
#include "grat/objectives/masking.hpp"

namespace grat::pipe {

namespace {

template <typename T>
std::vector<T> pick(const std::vector<T>& all, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

bool finite_values(const ad::ParamStore& store) {
  for (const auto& [name, t] : store.items()) {
    for (double x : t.data()) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

// Loss of one sample; `mask_rng` drives pretraining corruption.
ad::Tensor sample_loss(const GratModel& m, const graph::TranslationPair* pair, const graph::Graph* g, Rng& mask_rng) {
  switch (m.config.task) {
    case Task::kTranslate:
      return obj::translation_loss(m.encoder, *m.decoder, m.heads, source_input(pair->sources), pair->target).total;
    case Task::kProperty:
      return obj::l1_loss(obj::predict_properties(m.encoder, *m.property, *g), m.standardized_targets(*g));
    case Task::kPretrain: {
      const obj::MaskedGraphSample s = obj::mask_graph(*g, m.config.mask_rate, mask_rng);
      std::vector<double> targets;
      if (m.property) targets = m.standardized_targets(*g);
      return obj::pretrain_losses(m.encoder, m.heads.label, *m.recovery, m.property ? &*m.property : nullptr, s,
                                  m.property ? &targets : nullptr)
          .total;
    }
  }
  throw ContractError("unknown task");
}

// Node and edge cross-entropies averaged over every target in the batch, so
// large graphs weigh in proportion to their decisions.
ad::Tensor translation_batch_loss(const GratModel& m, const std::vector<graph::TranslationPair>& pairs,
                                  const std::vector<std::size_t>& batch, Rng* augment) {
  std::vector<ad::Tensor> node_terms, edge_terms;
  double node_count = 0.0, edge_count = 0.0;
  for (std::size_t i : batch) {
    graph::TranslationPair p = pairs[i];
    if (augment) {
      if (p.sources.size() != 1 || p.sources[0].size() != p.target.size()) {
        throw ContractError("permutation augmentation needs one source of the target's size");
      }
      const graph::GraphPermutation pi(augment->permutation(p.target.size()));
      p.sources[0] = graph::permute(p.sources[0], pi);
      p.target = graph::permute(p.target, pi);
    }
    const obj::TranslationLoss l =
        obj::translation_loss(m.encoder, *m.decoder, m.heads, source_input(p.sources), p.target);
    const double k = static_cast<double>(p.target.size());
    node_terms.push_back(ad::scale(l.node, k + 1.0));
    node_count += k + 1.0;
    if (k > 1.0) {
      edge_terms.push_back(ad::scale(l.edge, k * (k - 1.0) / 2.0));
      edge_count += k * (k - 1.0) / 2.0;
    }
  }
  auto total = [](const std::vector<ad::Tensor>& terms, double count) {
    ad::Tensor t = terms.front();
    for (std::size_t k = 1; k < terms.size(); ++k) t = ad::add(t, terms[k]);
    return ad::scale(t, 1.0 / count);
  };
  ad::Tensor loss = total(node_terms, node_count);
  if (!edge_terms.empty()) loss = ad::add(loss, total(edge_terms, edge_count));
  return loss;
}

ad::Tensor graph_batch_loss(const GratModel& m, const std::vector<graph::Graph>& graphs,
                            const std::vector<std::size_t>& batch, Rng& mask_rng) {
  ad::Tensor total;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const ad::Tensor l = sample_loss(m, nullptr, &graphs[batch[k]], mask_rng);
    total = k == 0 ? l : ad::add(total, l);
  }
  return ad::scale(total, 1.0 / static_cast<double>(batch.size()));
}

// Warmup ramp times optional linear decay, for 0-based step `step`.
double lr_factor(const RunConfig& c, std::size_t step) {
  double f = 1.0;
  if (c.warmup_steps) f = std::min(1.0, static_cast<double>(step + 1) / static_cast<double>(c.warmup_steps));
  if (c.linear_decay) f *= 1.0 - static_cast<double>(step) / static_cast<double>(c.max_steps);
  return f;
}

void fit_standardizer(GratModel& m, const std::vector<graph::Graph>& graphs) {
  const std::size_t tasks = m.spec.property_tasks.size();
  if (tasks == 0 || graphs.empty()) return;
  for (std::size_t t = 0; t < tasks; ++t) {
    std::vector<double> ys;
    for (const auto& g : graphs) {
      const auto it = g.properties.find(m.spec.property_tasks[t]);
      if (it == g.properties.end()) throw ContractError("graph lacks property '" + m.spec.property_tasks[t] + "'");
      ys.push_back(it->second);
    }
    double mean = 0.0;
    for (double y : ys) mean += y;
    mean /= static_cast<double>(ys.size());
    double var = 0.0;
    for (double y : ys) var += (y - mean) * (y - mean);
    const double sd = std::sqrt(var / static_cast<double>(ys.size()));
    m.target_mean[t] = mean;
    m.target_std[t] = sd > 0.0 ? sd : 1.0;
  }
}

}  // namespace

TrainData load_train_data(const RunConfig& c) {
  if (c.train_data.empty()) throw ContractError("config names no train_data");
  TrainData d;
  const auto train_lines = graph::read_lines(c.train_data);
  if (!c.node_labels.empty() || !c.edge_types.empty()) {
    d.vocab = {graph::NodeLabelVocab(c.node_labels), graph::EdgeTypeVocab(c.edge_types)};
  } else {
    std::vector<std::string> all = train_lines;
    for (const std::string& extra : {c.valid_data, c.test_data}) {
      if (extra.empty()) continue;
      const auto more = graph::read_lines(extra);
      all.insert(all.end(), more.begin(), more.end());
    }
    d.vocab = graph::scan_vocabularies(all);
  }

  const bool translate = c.task == Task::kTranslate;
  if (translate) {
    auto load = [&](const std::string& path) { return load_translation(path, &d.vocab).pairs; };
    auto all = load(c.train_data);
    if (c.valid_data.empty() && c.test_data.empty()) {
      const Split s = split_indices(all.size(), c.seed);
      d.train_pairs = pick(all, s.train);
      d.valid_pairs = pick(all, s.valid);
      d.test_pairs = pick(all, s.test);
    } else {
      d.train_pairs = std::move(all);
      if (!c.valid_data.empty()) d.valid_pairs = load(c.valid_data);
      if (!c.test_data.empty()) d.test_pairs = load(c.test_data);
    }
  } else {
    auto load = [&](const std::string& path) { return load_property(path, &d.vocab).graphs; };
    auto all = load(c.train_data);
    if (c.valid_data.empty() && c.test_data.empty()) {
      const Split s = split_indices(all.size(), c.seed);
      d.train_graphs = pick(all, s.train);
      d.valid_graphs = pick(all, s.valid);
      d.test_graphs = pick(all, s.test);
    } else {
      d.train_graphs = std::move(all);
      if (!c.valid_data.empty()) d.valid_graphs = load(c.valid_data);
      if (!c.test_data.empty()) d.test_graphs = load(c.test_data);
    }
  }
  return d;
}

ModelSpec model_spec(const RunConfig& c, const TrainData& d) {
  ModelSpec s;
  s.vocab = d.vocab;
  const graph::Graph* first = nullptr;
  if (!d.train_graphs.empty()) first = &d.train_graphs.front();
  if (c.task == Task::kTranslate) {
    if (!d.train_pairs.empty()) {
      const graph::Graph& src = d.train_pairs.front().sources.front();
      s.node_feature_dim = src.node_feature_dim;
      s.edge_feature_dim = src.edge_feature_dim;
    }
    return s;
  }
  if (first) {
    s.node_feature_dim = first->node_feature_dim;
    s.edge_feature_dim = first->edge_feature_dim;
  }
  if (!c.property_tasks.empty()) {
    s.property_tasks = c.property_tasks;
  } else if (first) {
    for (const auto& [name, v] : first->properties) s.property_tasks.push_back(name);
  }
  if (c.task == Task::kProperty && s.property_tasks.empty()) throw ContractError("property run without tasks");
  return s;
}

std::size_t evaluation_threads() {
  if (const char* env = std::getenv("GRAT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double mean_loss(const GratModel& model, const std::vector<graph::TranslationPair>& pairs,
                 const std::vector<graph::Graph>& graphs) {
  const bool translate = model.config.task == Task::kTranslate;
  const std::size_t n = translate ? pairs.size() : graphs.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  Rng mask_rng(model.config.seed + 2);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += sample_loss(model, translate ? &pairs[i] : nullptr, translate ? nullptr : &graphs[i], mask_rng).item();
  }
  return total / static_cast<double>(n);
}

obj::MetricReport evaluate_translation(const GratModel& model, const std::vector<graph::TranslationPair>& pairs,
                                       std::size_t beam_width, std::size_t max_nodes, std::size_t threads) {
  std::vector<char> hit(pairs.size(), 0);
  parallel_for(pairs.size(), threads ? threads : evaluation_threads(), [&](std::size_t i) {
    const auto out = model.generate(pairs[i].sources, beam_width, max_nodes);
    hit[i] = !out.empty() && obj::exact_match(out.front().graph, pairs[i].target);
  });
  obj::MetricReport r;
  r.count = pairs.size();
  r.matched = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  r.exact_match_rate = r.count ? static_cast<double>(r.matched) / static_cast<double>(r.count) : 0.0;
  return r;
}

obj::MetricReport evaluate_property(const GratModel& model, const std::vector<graph::Graph>& graphs,
                                    std::size_t threads) {
  const std::size_t tasks = model.spec.property_tasks.size();
  std::vector<std::vector<double>> err(graphs.size(), std::vector<double>(tasks));
  parallel_for(graphs.size(), threads ? threads : evaluation_threads(), [&](std::size_t i) {
    const auto pred = model.predict_properties(graphs[i]);
    for (std::size_t t = 0; t < tasks; ++t) {
      err[i][t] = std::abs(pred[t] - graphs[i].properties.at(model.spec.property_tasks[t]));
    }
  });
  obj::MetricReport r;
  r.count = graphs.size();
  if (graphs.empty()) return r;
  std::map<std::string, double> sigma;
  bool positive = true;
  for (std::size_t t = 0; t < tasks; ++t) {
    double s = 0.0;
    for (const auto& e : err) s += e[t];
    const std::string& name = model.spec.property_tasks[t];
    r.mae[name] = s / static_cast<double>(graphs.size());
    sigma[name] = model.target_std[t];
    positive = positive && r.mae[name] > 0.0;
  }
  r.std_mae = obj::std_mae(r.mae, sigma);
  if (positive) r.log_mae = obj::log_mae(r.mae);
  return r;
}

TrainResult train(const RunConfig& config, const TrainData& data, const GratModel* init, const TrainHooks& hooks) {
  auto log = [&](const std::string& s) {
    if (hooks.log) hooks.log(s);
  };
  TrainResult res{GratModel(config, model_spec(config, data)), {}, {}, {}, 0, false, false, {}, {}};
  GratModel& m = res.model;
  if (init) log("warm start: " + std::to_string(m.warm_start(*init)) + " tensors");
  fit_standardizer(m, data.train_graphs);
  res.adam.config = config.optimizer;

  const bool translate = config.task == Task::kTranslate;
  const auto& valid_pairs = data.valid_pairs;
  const auto& valid_graphs = data.valid_graphs;
  const std::size_t n = translate ? data.train_pairs.size() : data.train_graphs.size();
  const bool has_valid = translate ? !valid_pairs.empty() : !valid_graphs.empty();

  Rng order_rng(config.seed + 1);
  Rng mask_rng(config.seed + 3);
  Rng dropout_rng(config.seed + 4);
  Rng augment_rng(config.seed + 5);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  auto last_good = m.store.snapshot();
  auto best = last_good;
  double best_valid = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  bool out_of_steps = false;

  for (std::size_t epoch = 1; epoch <= config.epochs && n > 0 && !out_of_steps; ++epoch) {
    order_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t epoch_steps = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      if (config.max_steps && res.steps >= config.max_steps) {
        out_of_steps = true;
        break;
      }
      if (hooks.before_step) hooks.before_step(m, res.steps);
      const std::size_t end = std::min(n, start + config.batch_size);

      ad::Tape tape;
      double loss_value = 0.0;
      {
        ad::TapeScope scope(tape);
        attn::DropoutScope drop(config.dropout, dropout_rng);
        m.store.zero_grad();
        std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                       order.begin() + static_cast<std::ptrdiff_t>(end));
        const ad::Tensor loss = translate ? translation_batch_loss(m, data.train_pairs, batch,
                                                                   config.augment_permutations ? &augment_rng : nullptr)
                                          : graph_batch_loss(m, data.train_graphs, batch, mask_rng);
        loss_value = loss.item();
        if (std::isfinite(loss_value)) tape.backward(loss);
      }
      try {
        if (!std::isfinite(loss_value)) throw NumericError("non-finite loss");
        if (config.clip_norm > 0.0) ad::clip_grad_norm(m.store, config.clip_norm);
        ad::adam_step(m.store, res.adam, lr_factor(config, res.steps));
        if (!finite_values(m.store)) throw NumericError("non-finite parameter after update");
      } catch (const NumericError& e) {
        m.store.restore(last_good);
        res.numeric_failure = true;
        res.failure = "step " + std::to_string(res.steps + 1) + ": " + e.what();
        log(std::string("numeric failure: ") + e.what());
        return res;
      }
      last_good = m.store.snapshot();
      ++res.steps;
      ++epoch_steps;
      epoch_loss += loss_value;
      res.step_losses.push_back(loss_value);
    }
    if (epoch_steps == 0) break;

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(epoch_steps);
    rec.valid_loss = has_valid ? mean_loss(m, valid_pairs, valid_graphs) : std::nan("");
    rec.steps = res.steps;
    res.epochs.push_back(rec);
    log("epoch " + std::to_string(epoch) + " steps " + std::to_string(res.steps) + " train_loss " +
        std::to_string(rec.train_loss) + (has_valid ? " valid_loss " + std::to_string(rec.valid_loss) : ""));

    if (has_valid) {
      if (rec.valid_loss < best_valid) {
        best_valid = rec.valid_loss;
        best = m.store.snapshot();
        since_best = 0;
      } else if (++since_best >= config.patience) {
        res.stopped_early = true;
        log("early stop after epoch " + std::to_string(epoch));
        break;
      }
    }
  }
  if (has_valid && std::isfinite(best_valid)) m.store.restore(best);

  auto report = [&](const std::string& split, const std::vector<graph::TranslationPair>& pairs,
                    const std::vector<graph::Graph>& graphs) {
    if (translate ? pairs.empty() : graphs.empty()) return;
    obj::MetricReport r;
    if (config.task == Task::kTranslate) r = evaluate_translation(m, pairs, config.beam_width, config.max_nodes);
    if (config.task == Task::kProperty) r = evaluate_property(m, graphs);
    if (config.task == Task::kPretrain) r.count = graphs.size();
    r.loss = mean_loss(m, pairs, graphs);
    res.metrics[split] = r;
  };
  report("valid", valid_pairs, valid_graphs);
  report("test", data.test_pairs, data.test_graphs);
  return res;
}

}  // namespace grat::pipe
