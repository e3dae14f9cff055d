#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "grat/autodiff/params.hpp"

namespace grat::ad {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Decoupled weight decay (AdamW); 0 gives plain Adam.
  double weight_decay = 0.0;

  bool operator==(const AdamConfig&) const = default;
};

/// First/second moment buffers per parameter plus the step counter.
struct AdamState {
  AdamConfig config;
  std::uint64_t t = 0;
  std::map<std::string, std::vector<double>> m;
  std::map<std::string, std::vector<double>> v;
};

/// Rescales all gradients so their global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
double clip_grad_norm(ParamStore& params, double max_norm);

/// One bias-corrected Adam update of every parameter in `params` using the
/// accumulated gradients (a parameter without a gradient sees zeros).
/// `lr_scale` multiplies the configured learning rate for this step.
///
/// A NaN/Inf gradient aborts the whole step before anything is modified and
/// throws NumericError naming the parameter.
void adam_step(ParamStore& params, AdamState& state, double lr_scale = 1.0);

}  // namespace grat::ad
