#include "grat/autodiff/adam.hpp"

#include <cmath>

#include "grat/error.hpp"

namespace grat::ad {

double clip_grad_norm(ParamStore& params, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, t] : params.items()) {
    if (!t.has_grad()) continue;
    for (double g : t.grad()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && std::isfinite(norm)) {
    const double f = max_norm / norm;
    for (const auto& [name, tensor] : params.items()) {
      Tensor t = tensor;
      if (!t.has_grad()) continue;
      for (double& g : t.mutable_grad()) g *= f;
    }
  }
  return norm;
}

void adam_step(ParamStore& params, AdamState& state, double lr_scale) {
  for (const auto& [name, t] : params.items()) {
    if (!t.has_grad()) continue;
    for (double g : t.grad()) {
      if (!std::isfinite(g)) throw NumericError("non-finite gradient in parameter '" + name + "'");
    }
  }

  const AdamConfig& c = state.config;
  state.t += 1;
  const double step = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(c.beta1, step);
  const double correction2 = 1.0 - std::pow(c.beta2, step);
  const double lr = c.lr * lr_scale;

  for (const auto& [name, tensor] : params.items()) {
    Tensor t = tensor;
    const std::size_t n = t.numel();
    auto& m = state.m[name];
    auto& v = state.v[name];
    if (m.size() != n) m.assign(n, 0.0);
    if (v.size() != n) v.assign(n, 0.0);
    const std::vector<double> g = t.grad();
    auto w = t.mutable_data();
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      const double denom = std::sqrt(v_hat) + c.eps;
      if (c.weight_decay != 0.0) w[i] -= lr * c.weight_decay * w[i];
      if (denom > 0.0) w[i] -= lr * m_hat / denom;
    }
  }
}

}  // namespace grat::ad
