// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Tolerances are pinned here, not taken from
// the command line.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "grat/attention/encoder.hpp"
#include "grat/decoder/batch.hpp"
#include "grat/decoder/generate.hpp"
#include "grat/graph/transform.hpp"
#include "grat/objectives/masking.hpp"
#include "grat/objectives/metrics.hpp"
#include "grat/pipeline/checkpoint.hpp"
#include "grat/pipeline/trainer.hpp"
#include "grat/smiles/smiles_lite.hpp"
#include "smiles_corpus.hpp"
#include "support.hpp"

using namespace grat;
using graph::Graph;

namespace {

constexpr double kGradTol = 1e-5;
constexpr double kFdStep = 1e-6;
constexpr double kTwoPathTol = 1e-9;
constexpr double kPermTol = 1e-8;
constexpr double kMetricTol = 1e-12;
constexpr double kCopyTrain = 0.95, kCopyHeld = 0.80, kRelabelHeld = 0.75;
constexpr double kCopyMinutes = 30.0;
constexpr double kOverfitRatio = 0.05;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Verdict()>& check) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> row(const ad::Tensor& t, std::size_t r) {
  return std::vector<double>(t.data().begin() + r * t.cols(), t.data().begin() + (r + 1) * t.cols());
}

// A randomized desk translation model and an encoded source.
struct Fixture {
  pipe::GratModel model;
  ad::Tensor memory;
  explicit Fixture(std::uint64_t seed) : model(testkit::translation_model(seed)) {
    Rng rng(seed + 1000);
    testkit::randomize(model.store, rng, 0.3);
    memory = attn::encode(model.encoder, testkit::random_graph(rng, 1, 8)).hidden;
  }
  dec::DecodeOutput run(const dec::DecoderBatch& b, const ad::Tensor* offset = nullptr) const {
    return dec::decode_forward(*model.decoder, model.heads, memory, b, {offset});
  }
};

// ---- 1: gradients ---------------------------------------------------------

// Every op of the engine in one randomly sized network.
testkit::GradCheck composite_network(Rng& rng) {
  using testkit::random_tensor;
  const std::size_t m = 2 + rng.uniform_index(3), k = 2 + rng.uniform_index(3), n = 2 + rng.uniform_index(3);
  const std::size_t d = 2 * n, extra = 1 + rng.uniform_index(2), classes = 3;
  const auto x = random_tensor(rng, {m, k}), w = random_tensor(rng, {k, n}), b = random_tensor(rng, {n});
  const auto c = random_tensor(rng, {m, n}), gain = random_tensor(rng, {d}), lb = random_tensor(rng, {d});
  const auto gamma = random_tensor(rng, {m, m + extra}), beta = random_tensor(rng, {m, m + extra});
  const auto wc = random_tensor(rng, {d, classes});
  const auto p1 = random_tensor(rng, {m, n}, 1.0, false), p2 = random_tensor(rng, {m * n}, 1.0, false);
  const auto p3 = random_tensor(rng, {m, d}, 1.0, false), p4 = random_tensor(rng, {m - 1, d}, 1.0, false);
  std::vector<std::size_t> pick(extra), targets(m);
  for (auto& i : pick) i = rng.uniform_index(m);
  for (auto& t : targets) t = rng.uniform_index(classes);
  ad::Mask smask(m, n, true), amask(m, m + extra, true);
  for (std::size_t i = 0; i < m; ++i) {
    smask.set(i, rng.uniform_index(n), false);
    amask.set(i, rng.uniform_index(m + extra), false);
  }

  auto f = [&] {
    const auto y = ad::add_row(ad::matmul(x, w), b);
    const auto t = ad::tanh(y);
    const auto r = ad::abs(ad::mul(t, ad::relu(ad::sub(y, c))));
    const auto h = ad::layer_norm(ad::concat_cols({t, ad::add(r, t)}), gain, lb);
    const auto kv = ad::concat_rows({h, ad::gather_rows(h, pick)});
    const auto film = ad::film_attention(h, kv, kv, gamma, beta, &amask, 2).output;
    const auto plain = ad::scaled_dot_attention(h, kv, kv, nullptr, 2).output;
    ad::Tensor loss = ad::sum(ad::mul(ad::softmax_rows(ad::scale(ad::add_scalar(y, 0.2), 1.3), &smask).probs, p1));
    loss = ad::add(loss, ad::sum(ad::mul(ad::reshape(ad::transpose(y), {m * n}), p2)));
    loss = ad::add(loss, ad::mean(ad::mul(film, p3)));
    loss = ad::add(loss, ad::sum(ad::mul(ad::slice_rows(plain, 1, m - 1), p4)));
    loss = ad::add(loss, ad::cross_entropy(ad::matmul(ad::slice_cols(ad::add(film, plain), 0, d), wc), targets));
    return loss;
  };
  return testkit::check_gradients(f,
                                  {{"x", x}, {"w", w}, {"b", b}, {"c", c}, {"gain", gain}, {"lb", lb},
                                   {"gamma", gamma}, {"beta", beta}, {"wc", wc}},
                                  rng, 0, kFdStep);
}

// Full desk encoder+decoder (translation) or encoder+recovery+property
// (pretraining) loss against every parameter tensor.
testkit::GradCheck full_model(Rng& rng, bool translation) {
  if (translation) {
    auto m = testkit::translation_model(rng.uniform_index(1000), 3, 2, rng.bernoulli(0.5));
    testkit::randomize(m.store, rng, 0.3);
    const Graph src = testkit::random_graph(rng, 2, 6), tgt = testkit::random_graph(rng, 2, 5);
    auto f = [&] { return obj::translation_loss(m.encoder, *m.decoder, m.heads, src, tgt).total; };
    return testkit::check_gradients(f, testkit::store_leaves(m.store), rng, 4, kFdStep);
  }
  pipe::RunConfig c = pipe::preset("desk");
  c.task = pipe::Task::kPretrain;
  pipe::ModelSpec spec{pipe::synthetic_vocab(3, 2), {"t"}, 0, 0};
  pipe::GratModel m(c, spec);
  testkit::randomize(m.store, rng, 0.3);
  const Graph g = testkit::random_graph(rng, 4, 7, 3, 2, 0.5);
  const auto sample = obj::mask_graph(g, 0.3, rng);
  const std::vector<double> target = {0.4};
  auto f = [&] { return obj::pretrain_losses(m.encoder, m.heads.label, *m.recovery, &*m.property, sample, &target).total; };
  return testkit::check_gradients(f, testkit::store_leaves(m.store), rng, 4, kFdStep);
}

Verdict gradient_oracle() {
  Rng rng(101);
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0;
  for (int net = 0; net < 20; ++net) {
    // 16 composite networks, 2 translation models, 2 pretraining models.
    const auto r = net < 16 ? composite_network(rng) : full_model(rng, net < 18);
    checked += r.checked;
    if (r.worst > worst) {
      worst = r.worst;
      where = "net " + std::to_string(net) + " " + r.where;
    }
  }
  return {worst <= kGradTol, "20 networks, " + std::to_string(checked) + " coordinates, worst rel err " +
                                 fmt("%.2e", worst) + " at " + where + " (tol 1e-5)"};
}

// ---- 2: identity modulation ---------------------------------------------

Verdict identity_film() {
  Rng rng(102);
  int equal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t heads = std::size_t{1} << rng.uniform_index(3);
    const std::size_t d = heads * (1 + rng.uniform_index(4));
    const std::size_t nq = 1 + rng.uniform_index(8), nk = 1 + rng.uniform_index(8);
    const auto q = testkit::random_tensor(rng, {nq, d}, 3.0, false);
    const auto k = testkit::random_tensor(rng, {nk, d}, 3.0, false);
    const auto v = testkit::random_tensor(rng, {nk, d}, 3.0, false);
    ad::Mask mask(nq, nk, true);
    const bool masked = trial % 2 == 1;
    if (masked) {
      for (std::size_t i = 0; i < nq; ++i)
        for (std::size_t j = 0; j < nk; ++j) mask.set(i, j, rng.bernoulli(0.7));
    }
    const auto a = ad::film_attention(q, k, v, ad::Tensor::filled({nq, nk}, 1.0), ad::Tensor::zeros({nq, nk}),
                                      masked ? &mask : nullptr, heads);
    const auto b = ad::scaled_dot_attention(q, k, v, masked ? &mask : nullptr, heads);
    const bool same = std::equal(a.output.data().begin(), a.output.data().end(), b.output.data().begin(),
                                 b.output.data().end()) &&
                      a.weights == b.weights;
    equal += same;
  }
  return {equal == 100, std::to_string(equal) + "/100 cases bitwise equal"};
}

// ---- 3: teacher forcing vs prefixes -------------------------------------

Verdict two_path() {
  Rng rng(103);
  double worst = 0.0;
  std::size_t rows = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Fixture f(300 + trial);
    const Graph g = testkit::random_graph(rng, 1, 10);
    const auto b = dec::build_decoder_batch(g);
    const auto full = f.run(b);
    std::size_t q = 0;
    for (std::size_t s = 0; s <= g.size(); ++s) {
      const auto part = f.run(dec::build_prefix_batch(graph::prefix_subgraph(g, s)));
      worst = std::max(worst, testkit::max_abs_diff(row(full.node_logits, s), row(part.node_logits, s)));
      ++rows;
      if (s == 0 || s == g.size()) continue;
      for (std::size_t j = 0; j < s; ++j, ++q) {
        if (b.edge_queries[q].step != s || b.edge_queries[q].node != j) return {false, "edge query order"};
        worst = std::max(worst, testkit::max_abs_diff(row(full.edge_logits, q), row(part.edge_logits, j)));
        ++rows;
      }
    }
  }
  return {worst <= kTwoPathTol,
          "50 graphs, " + std::to_string(rows) + " logit rows, max diff " + fmt("%.2e", worst) + " (tol 1e-9)"};
}

// ---- 4: causality and isolation -----------------------------------------

Verdict causality() {
  Rng rng(104);
  std::size_t compared = 0, changed = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Fixture f(400 + trial);
    const Graph g = testkit::random_graph(rng, 2, 9);
    const auto b = dec::build_decoder_batch(g);
    const auto base = f.run(b);

    // Rewrite every node from j on: labels and all their bonds.
    const std::size_t j = 1 + rng.uniform_index(g.size() - 1);
    Graph h = g;
    for (std::size_t u = j; u < g.size(); ++u) {
      h.labels[u] = graph::token::kReservedCount + rng.uniform_index(3);
      for (std::size_t v = 0; v < u; ++v) {
        h.set_edge(u, v, rng.bernoulli(0.5) ? graph::edge::kNoBond : graph::edge::kReservedCount + rng.uniform_index(2));
      }
    }
    const auto moved = f.run(dec::build_decoder_batch(h));
    for (std::size_t s = 0; s <= j; ++s) {
      ++compared;
      changed += row(base.node_logits, s) != row(moved.node_logits, s);
    }
    for (std::size_t q = 0; q < b.edge_queries.size(); ++q) {
      if (b.edge_queries[q].step > j) continue;
      ++compared;
      changed += row(base.edge_logits, q) != row(moved.edge_logits, q);
    }

    // Perturb the input of one <G>; every other step must be unaffected.
    const std::size_t s0 = rng.uniform_index(g.size() + 1);
    auto offset = ad::Tensor::zeros({b.length(), f.model.config.decoder.width});
    for (std::size_t c = 0; c < offset.cols(); ++c) {
      offset.mutable_data()[dec::DecoderBatch::generate_position(s0) * offset.cols() + c] = rng.normal();
    }
    const auto shifted = f.run(b, &offset);
    for (std::size_t s = 0; s <= g.size(); ++s) {
      if (s == s0) continue;
      ++compared;
      changed += row(base.node_logits, s) != row(shifted.node_logits, s);
    }
    for (std::size_t q = 0; q < b.edge_queries.size(); ++q) {
      if (b.edge_queries[q].step == s0) continue;
      ++compared;
      changed += row(base.edge_logits, q) != row(shifted.edge_logits, q);
    }
  }
  return {changed == 0, "50 trials, " + std::to_string(compared) + " protected rows, " + std::to_string(changed) +
                            " changed (exact comparison)"};
}

// ---- 5: permutation invariance ------------------------------------------

Verdict permutation_invariance() {
  Rng rng(105);
  pipe::RunConfig c = pipe::preset("desk");
  c.task = pipe::Task::kProperty;
  c.encoder.use_positional_encoding = false;
  pipe::GratModel m(c, pipe::ModelSpec{pipe::synthetic_vocab(3, 2), {"t"}, 0, 0});
  testkit::randomize(m.store, rng, 0.3);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = testkit::random_graph(rng, 3, 10, 3, 2, 0.4);
    auto readout = [&](const Graph& x) {
      return attn::readout_cls(attn::encode(m.encoder, graph::prepend_token(x, graph::token::kCls)).hidden);
    };
    const auto ref = readout(g);
    for (int p = 0; p < 20; ++p) {
      const auto r = readout(graph::permute(g, graph::GraphPermutation(rng.permutation(g.size()))));
      worst = std::max(worst, testkit::max_abs_diff(ref.data(), r.data()));
    }
  }
  return {worst <= kPermTol, "10 graphs x 20 permutations, max readout diff " + fmt("%.2e", worst) + " (tol 1e-8)"};
}

// ---- 6, 7: learning ------------------------------------------------------

// Tuned desk recipe for the translation tasks.
pipe::RunConfig translation_recipe() {
  pipe::RunConfig c = pipe::preset("desk");
  c.task = pipe::Task::kTranslate;
  c.encoder.use_positional_encoding = true;
  c.encoder.neighbor_only = true;
  c.augment_permutations = true;
  c.batch_size = 128;
  c.clip_norm = 1.0;
  c.warmup_steps = 100;
  c.linear_decay = true;
  c.optimizer.lr = 1e-3;
  c.max_steps = 2000;
  c.epochs = 1000000;
  c.patience = 1000000;
  c.dropout = 0.0;
  c.beam_width = 1;
  return c;
}

struct LearnResult {
  double train = 0.0, held = 0.0, minutes = 0.0;
  std::size_t steps = 0;
};

LearnResult learn(bool relabel) {
  pipe::GraphGenOptions o;
  o.count = 200;
  o.max_nodes = 8;
  o.labels = 3;
  o.edge_types = 2;
  o.seed = 11;
  pipe::GraphGenOptions h = o;
  h.count = 50;
  h.seed = 12;
  const auto train_set = relabel ? pipe::gen_relabel_dataset(o) : pipe::gen_copy_dataset(o);
  const auto held_set = relabel ? pipe::gen_relabel_dataset(h) : pipe::gen_copy_dataset(h);
  pipe::TrainData d;
  d.vocab = train_set.vocab;
  d.train_pairs = train_set.pairs;

  const auto t0 = Clock::now();
  const auto r = pipe::train(translation_recipe(), d);
  LearnResult out;
  out.minutes = seconds_since(t0) / 60.0;
  out.steps = r.steps;
  if (r.numeric_failure) throw NumericError(r.failure);
  out.train = *pipe::evaluate_translation(r.model, train_set.pairs, 1, 32).exact_match_rate;
  out.held = *pipe::evaluate_translation(r.model, held_set.pairs, 1, 32).exact_match_rate;
  return out;
}

Verdict copy_task() {
  const auto r = learn(false);
  const bool ok = r.train >= kCopyTrain && r.held >= kCopyHeld && r.steps <= 2000 && r.minutes <= kCopyMinutes;
  return {ok, "train exact " + fmt("%.3f", r.train) + " (>= 0.95), held-out " + fmt("%.3f", r.held) +
                  " (>= 0.80), " + std::to_string(r.steps) + " steps, training " + fmt("%.1f", r.minutes) +
                  " min (<= 30)"};
}

Verdict relabel_task() {
  const auto r = learn(true);
  const bool ok = r.held >= kRelabelHeld && r.steps <= 2000 && r.minutes <= kCopyMinutes;
  return {ok, "held-out exact " + fmt("%.3f", r.held) + " (>= 0.75), train " + fmt("%.3f", r.train) + ", " +
                  std::to_string(r.steps) + " steps, training " + fmt("%.1f", r.minutes) + " min"};
}

// ---- 8: property overfit and pretraining ---------------------------------

pipe::RunConfig property_recipe(std::size_t steps) {
  pipe::RunConfig c = pipe::preset("desk");
  c.task = pipe::Task::kProperty;
  c.property_tasks = {"t1"};
  c.clip_norm = 1.0;
  c.warmup_steps = 100;
  c.linear_decay = true;
  c.optimizer.lr = 1e-3;
  c.max_steps = steps;
  c.epochs = 1000000;
  c.patience = 1000000;
  return c;
}

double train_mae(const pipe::RunConfig& c, const pipe::TrainData& d, const pipe::GratModel* init) {
  const auto r = pipe::train(c, d, init);
  if (r.numeric_failure) throw NumericError(r.failure);
  return pipe::evaluate_property(r.model, d.train_graphs).mae.at("t1");
}

// Masked node/edge pretraining; `aux_target`, when set, adds graph-level
// regression of that property through <CLS>. The fine-tuning target t1 is
// always removed from the pretraining graphs.
pipe::GratModel pretrain(const pipe::TrainData& d, const std::string& aux_target) {
  pipe::RunConfig p = property_recipe(1000);
  p.task = pipe::Task::kPretrain;
  p.property_tasks.clear();
  pipe::TrainData pd = d;
  for (auto& g : pd.train_graphs) {
    g.properties.erase("t1");
    if (aux_target.empty()) g.properties.clear();
  }
  if (!aux_target.empty()) p.property_tasks = {aux_target};
  auto r = pipe::train(p, pd);
  if (r.numeric_failure) throw NumericError(r.failure);
  return std::move(r.model);
}

Verdict property_overfit() {
  pipe::GraphGenOptions o;
  o.count = 64;
  o.seed = 21;
  const auto ds = pipe::gen_property_dataset(o);
  pipe::TrainData d;
  d.vocab = ds.vocab;
  d.train_graphs = ds.graphs;
  double mean = 0.0, var = 0.0;
  for (const auto& g : ds.graphs) mean += g.properties.at("t1") / 64.0;
  for (const auto& g : ds.graphs) var += std::pow(g.properties.at("t1") - mean, 2) / 64.0;
  const double sd = std::sqrt(var);

  const auto c = property_recipe(3000);
  const double scratch = train_mae(c, d, nullptr);
  const auto pre = pretrain(d, "t2");
  const double warm = train_mae(c, d, &pre);
  // Masking alone, for the record; not part of the verdict.
  const auto pre_masked = pretrain(d, "");
  const double warm_masked = train_mae(c, d, &pre_masked);

  const bool ok = scratch <= kOverfitRatio * sd && warm <= scratch;
  return {ok, "sigma " + fmt("%.4f", sd) + ", scratch MAE " + fmt("%.5f", scratch) + " = " +
                  fmt("%.5f", scratch / sd) + " sigma (<= 0.05), after pretraining " + fmt("%.5f", warm) +
                  " (<= scratch); masking-only pretraining gives " + fmt("%.5f", warm_masked)};
}

// ---- 9: metrics and beam width 1 ------------------------------------------

Verdict metrics_and_beam() {
  const double s = obj::std_mae({{"a", 1.0}, {"b", 2.0}}, {{"a", 1.0}, {"b", 2.0}});
  const double l = obj::log_mae({{"a", std::exp(1.0)}, {"b", std::exp(1.0)}});
  Rng rng(109);
  int same = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto m = testkit::translation_model(900 + trial, 2 + rng.uniform_index(3), 1 + rng.uniform_index(3));
    testkit::randomize(m.store, rng, 0.2 + 0.4 * rng.uniform(0.0, 1.0));
    const Graph src = pipe::random_connected_graph(rng, 1 + rng.uniform_index(7), 2, 1, 0.3);
    const auto mem = attn::encode(m.encoder, src).hidden;
    const std::size_t max_nodes = 1 + rng.uniform_index(8);
    const auto g = dec::generate_greedy(*m.decoder, m.heads, mem, max_nodes);
    const auto b = dec::generate_beam(*m.decoder, m.heads, mem, 1, max_nodes);
    same += b.size() == 1 && b[0].graph == g.graph && b[0].score == g.score && b[0].truncated == g.truncated;
  }
  const bool ok = std::abs(s - 1.0) <= kMetricTol && std::abs(l - 1.0) <= kMetricTol && same == 100;
  return {ok, "stdMAE " + fmt("%.15f", s) + ", logMAE " + fmt("%.15f", l) + ", beam 1 == greedy in " +
                  std::to_string(same) + "/100"};
}

// ---- 10: formats ------------------------------------------------------------

Graph random_instance(Rng& rng, std::size_t labels, std::size_t edge_types) {
  Graph g = pipe::random_connected_graph(rng, 1 + rng.uniform_index(9), labels, edge_types, rng.uniform(0.0, 0.8));
  if (rng.bernoulli(0.3)) {
    g.node_feature_dim = 1 + rng.uniform_index(3);
    for (std::size_t i = 0; i < g.size() * g.node_feature_dim; ++i) g.node_features.push_back(rng.normal() * 1e3);
  }
  const std::size_t props = rng.uniform_index(3);
  for (std::size_t p = 0; p < props; ++p) {
    g.properties["p" + std::to_string(p)] = rng.normal() * std::pow(10.0, rng.uniform(-12.0, 12.0));
  }
  return g;
}

pipe::GratModel random_model(Rng& rng) {
  pipe::RunConfig c = pipe::preset("desk");
  const std::size_t heads = std::size_t{1} << rng.uniform_index(3);
  c.encoder.layers = c.decoder.layers = 1 + rng.uniform_index(2);
  c.encoder.heads = c.decoder.heads = heads;
  c.encoder.width = c.decoder.width = heads * (2 + rng.uniform_index(4));
  c.encoder.ff_width = c.decoder.ff_width = 4 + rng.uniform_index(12);
  c.pair_width = 2 + rng.uniform_index(6);
  c.edge_hidden = c.property_hidden = 2 + rng.uniform_index(6);
  c.task = static_cast<pipe::Task>(rng.uniform_index(3));
  c.seed = rng.uniform_index(1u << 30);
  pipe::ModelSpec spec;
  spec.vocab = pipe::synthetic_vocab(1 + rng.uniform_index(5), 1 + rng.uniform_index(3));
  if (c.task == pipe::Task::kProperty) spec.property_tasks = {"a", "b"};
  pipe::GratModel m(c, spec);
  for (const auto& [name, t] : m.store.items()) {
    std::vector<double> v(t.numel());
    for (double& x : v) x = rng.normal() * std::pow(10.0, rng.uniform(-300.0, 300.0));
    m.store.assign(name, v);
  }
  for (std::size_t t = 0; t < m.target_mean.size(); ++t) {
    m.target_mean[t] = rng.normal();
    m.target_std[t] = rng.uniform(0.1, 10.0);
  }
  return m;
}

Verdict formats() {
  Rng rng(110);
  int graphs_ok = 0, ckpt_ok = 0;
  const auto vocab = pipe::synthetic_vocab(4, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    graph::TranslationPair p;
    const std::size_t parts = 1 + rng.uniform_index(3);
    for (std::size_t k = 0; k < parts; ++k) {
      p.sources.push_back(random_instance(rng, 4, 3));
      if (parts > 1) p.sources.back().delimiter = graph::token::kReactant + rng.uniform_index(3);
    }
    p.target = random_instance(rng, 4, 3);
    const Graph g = random_instance(rng, 4, 3);
    graphs_ok += graph::parse_graph(graph::serialize(g, vocab), vocab) == g &&
                 graph::parse_translation(graph::serialize_translation(p, vocab), vocab) == p;
  }

  const auto dir = std::filesystem::temp_directory_path() / "grat_acceptance";
  std::filesystem::create_directories(dir);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto m = random_model(rng);
    ad::AdamState adam;
    adam.t = rng.uniform_index(100000);
    adam.config.lr = rng.uniform(1e-5, 1e-2);
    for (const auto& [name, t] : m.store.items()) {
      if (!rng.bernoulli(0.7)) continue;
      adam.m[name].resize(t.numel());
      adam.v[name].resize(t.numel());
      for (double& x : adam.m[name]) x = rng.normal();
      for (double& x : adam.v[name]) x = rng.uniform(0.0, 1.0);
    }
    pipe::Checkpoint back;
    if (trial % 10 == 0) {
      const std::string path = (dir / "c.ckpt").string();
      pipe::save_checkpoint(path, m, &adam);
      back = pipe::load_checkpoint(path);
    } else {
      back = pipe::decode_checkpoint(pipe::encode_checkpoint(pipe::make_checkpoint(m, &adam)));
    }
    const auto ref = pipe::make_checkpoint(m, &adam);
    const auto rebuilt = pipe::model_from_checkpoint(back);
    bool same = back.params == ref.params && back.config == ref.config && back.spec == ref.spec &&
                back.target_mean == ref.target_mean && back.target_std == ref.target_std && back.adam &&
                back.adam->t == adam.t && back.adam->m == adam.m && back.adam->v == adam.v &&
                back.adam->config.lr == adam.config.lr;
    for (const auto& [name, t] : rebuilt.store.items()) {
      const auto& orig = m.store.get(name);
      same = same && std::equal(t.data().begin(), t.data().end(), orig.data().begin(), orig.data().end(),
                                [](double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); });
    }
    ckpt_ok += same;
  }
  std::filesystem::remove_all(dir);

  const auto mol = smiles::molecule_vocabularies();
  int smiles_ok = 0;
  std::string first_bad;
  for (const auto& s : testkit::smiles_corpus()) {
    const Graph g = smiles::parse_smiles_lite(s, mol);
    const bool ok = testkit::isomorphic(smiles::parse_smiles_lite(smiles::write_smiles_lite(g, mol), mol), g);
    smiles_ok += ok;
    if (!ok && first_bad.empty()) first_bad = s;
  }
  const bool ok = graphs_ok == 1000 && ckpt_ok == 1000 && smiles_ok == 50;
  return {ok, "JSONL " + std::to_string(graphs_ok) + "/1000, checkpoints " + std::to_string(ckpt_ok) +
                  "/1000 bit-exact, SMILES " + std::to_string(smiles_ok) + "/50 isomorphic" +
                  (first_bad.empty() ? "" : " (first failure " + first_bad + ")")};
}

}  // namespace

int main() {
  report(1, "gradient oracle", gradient_oracle);
  report(2, "identity FiLM", identity_film);
  report(3, "two-path decoding", two_path);
  report(4, "causality and isolation", causality);
  report(5, "permutation invariance", permutation_invariance);
  report(6, "copy task", copy_task);
  report(7, "relabel task", relabel_task);
  report(8, "property overfit", property_overfit);
  report(9, "metrics and beam", metrics_and_beam);
  report(10, "formats", formats);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
