#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "grat/autodiff/ops.hpp"
#include "grat/autodiff/params.hpp"
#include "grat/autodiff/tape.hpp"
#include "grat/error.hpp"
#include "grat/graph/graph.hpp"
#include "grat/pipeline/datasets.hpp"
#include "grat/pipeline/model.hpp"
#include "grat/rng.hpp"

namespace grat::testkit {

inline ad::Tensor random_tensor(Rng& rng, ad::Shape shape, double scale = 1.0, bool requires_grad = true) {
  std::vector<double> v(ad::numel(shape));
  for (double& x : v) x = rng.uniform(-scale, scale);
  return ad::Tensor(std::move(shape), std::move(v), requires_grad);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// |a - n| / max(|a|, |n|, floor). The floor keeps near-zero gradients from
// turning rounding noise into huge relative errors.
inline double relative_error(double analytic, double numeric, double floor = 1e-4) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

struct GradCheck {
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0;
};

/// Compares reverse-mode gradients of f with central differences at step h.
/// `leaves` are perturbed in place; per leaf at most `per_leaf` coordinates
/// are sampled (all when 0).
inline GradCheck check_gradients(const std::function<ad::Tensor()>& f, std::vector<std::pair<std::string, ad::Tensor>> leaves,
                                 Rng& rng, std::size_t per_leaf = 0, double h = 1e-6) {
  for (auto& [name, t] : leaves) t.zero_grad();
  {
    ad::Tape tape;
    ad::TapeScope scope(tape);
    ad::backward(f());
  }
  GradCheck out;
  for (auto& [name, t] : leaves) {
    const std::vector<double> analytic = t.grad();
    std::vector<std::size_t> coords(t.numel());
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    if (per_leaf && coords.size() > per_leaf) {
      rng.shuffle(coords);
      coords.resize(per_leaf);
    }
    auto data = t.mutable_data();
    for (std::size_t i : coords) {
      const double keep = data[i];
      data[i] = keep + h;
      const double up = f().item();
      data[i] = keep - h;
      const double down = f().item();
      data[i] = keep;
      const double err = relative_error(analytic[i], (up - down) / (2 * h));
      ++out.checked;
      if (err > out.worst) {
        out.worst = err;
        out.where = name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return out;
}

inline std::vector<std::pair<std::string, ad::Tensor>> store_leaves(const ad::ParamStore& store) {
  std::vector<std::pair<std::string, ad::Tensor>> out;
  for (const auto& [name, t] : store.items()) out.emplace_back(name, t);
  return out;
}

/// Random connected graph over the synthetic vocabulary of `labels` labels
/// and `edge_types` bond types.
inline graph::Graph random_graph(Rng& rng, std::size_t min_nodes, std::size_t max_nodes, std::size_t labels = 3,
                                 std::size_t edge_types = 2, double density = 0.3) {
  const std::size_t n = min_nodes + rng.uniform_index(max_nodes - min_nodes + 1);
  return pipe::random_connected_graph(rng, n, labels, edge_types, density);
}

/// Desk-sized translation model over the synthetic vocabulary.
inline pipe::GratModel translation_model(std::uint64_t seed, std::size_t labels = 3, std::size_t edge_types = 2,
                                         bool encoder_pe = false) {
  pipe::RunConfig c = pipe::preset("desk");
  c.task = pipe::Task::kTranslate;
  c.seed = seed;
  c.encoder.use_positional_encoding = encoder_pe;
  pipe::ModelSpec spec;
  spec.vocab = pipe::synthetic_vocab(labels, edge_types);
  return pipe::GratModel(c, spec);
}

/// Parameters are small at init; pushing them to a wider range makes the
/// logits far from uniform so comparisons are not trivially satisfied.
inline void randomize(ad::ParamStore& store, Rng& rng, double scale = 0.5) {
  for (const auto& [name, t] : store.items()) {
    std::vector<double> v(t.numel());
    for (double& x : v) x = rng.uniform(-scale, scale);
    store.assign(name, v);
  }
}

}  // namespace grat::testkit
