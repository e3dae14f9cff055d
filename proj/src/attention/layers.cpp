#include "grat/attention/layers.hpp"

#include <cmath>

#include "grat/error.hpp"

namespace grat::attn {

Linear Linear::create(ad::ParamStore& store, const std::string& name, std::size_t in, std::size_t out, Rng& rng,
                      Init init) {
  std::vector<double> w(in * out, 0.0);
  if (init == Init::kXavier) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    for (double& x : w) x = rng.uniform(-limit, limit);
  }
  Linear l;
  l.weight = store.add(name + ".weight", {in, out}, std::move(w));
  l.bias = store.add(name + ".bias", {out}, std::vector<double>(out, 0.0));
  return l;
}

LayerNormParams LayerNormParams::create(ad::ParamStore& store, const std::string& name, std::size_t width) {
  LayerNormParams p;
  p.gain = store.add(name + ".gain", {width}, std::vector<double>(width, 1.0));
  p.bias = store.add(name + ".bias", {width}, std::vector<double>(width, 0.0));
  return p;
}

FeedForward FeedForward::create(ad::ParamStore& store, const std::string& name, std::size_t width,
                                std::size_t hidden, Rng& rng) {
  return FeedForward{Linear::create(store, name + ".in", width, hidden, rng),
                     Linear::create(store, name + ".out", hidden, width, rng)};
}

MultiHeadAttention MultiHeadAttention::create(ad::ParamStore& store, const std::string& name, std::size_t width,
                                              std::size_t heads, Rng& rng) {
  MultiHeadAttention a;
  a.query = Linear::create(store, name + ".query", width, width, rng);
  a.key = Linear::create(store, name + ".key", width, width, rng);
  a.value = Linear::create(store, name + ".value", width, width, rng);
  a.output = Linear::create(store, name + ".output", width, width, rng);
  a.heads = heads;
  return a;
}

MultiHeadAttention::Result MultiHeadAttention::operator()(const ad::Tensor& x, const ad::Tensor& memory,
                                                          Modulation film, const ad::Mask* mask) const {
  const ad::Tensor q = query(x);
  const ad::Tensor k = key(memory);
  const ad::Tensor v = value(memory);
  ad::AttentionResult att = film.gamma ? ad::film_attention(q, k, v, *film.gamma, *film.beta, mask, heads)
                                       : ad::scaled_dot_attention(q, k, v, mask, heads);
  ad::Tensor projected = dropout(output(att.output));
  return Result{std::move(projected), std::move(att)};
}

namespace {

thread_local double dropout_rate = 0.0;
thread_local Rng* dropout_rng = nullptr;

}  // namespace

DropoutScope::DropoutScope(double rate, Rng& rng) : previous_rate_(dropout_rate), previous_rng_(dropout_rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ContractError("dropout rate must lie in [0, 1)");
  dropout_rate = rate;
  dropout_rng = &rng;
}

DropoutScope::~DropoutScope() {
  dropout_rate = previous_rate_;
  dropout_rng = previous_rng_;
}

ad::Tensor dropout(const ad::Tensor& x) {
  if (dropout_rate == 0.0 || dropout_rng == nullptr) return x;
  const double keep = 1.0 - dropout_rate;
  std::vector<double> mask(x.numel());
  for (double& m : mask) m = dropout_rng->bernoulli(keep) ? 1.0 / keep : 0.0;
  return ad::mul(x, ad::Tensor(x.shape(), std::move(mask)));
}

ad::Tensor sinusoidal_encoding(std::size_t positions, std::size_t width) {
  std::vector<double> pos(positions);
  for (std::size_t p = 0; p < positions; ++p) pos[p] = static_cast<double>(p);
  return sinusoidal_encoding(pos, width);
}

ad::Tensor sinusoidal_encoding(const std::vector<double>& positions, std::size_t width) {
  const std::size_t n = positions.size();
  std::vector<double> table(n * width);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t i = 0; i < width; ++i) {
      const double rate = std::pow(10000.0, static_cast<double>(2 * (i / 2)) / static_cast<double>(width));
      const double angle = positions[p] / rate;
      table[p * width + i] = i % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
  }
  return ad::Tensor::matrix(n, width, std::move(table));
}

}  // namespace grat::attn
