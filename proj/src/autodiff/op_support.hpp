#pragma once

#include <initializer_list>
#include <string>
#include <utility>

#include "grat/autodiff/tape.hpp"
#include "grat/autodiff/tensor.hpp"
#include "grat/error.hpp"

namespace grat::ad::detail {

inline bool tracking(std::initializer_list<const Tensor*> inputs) {
  if (active_tape() == nullptr) return false;
  for (const Tensor* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

/// Builds the op result and, when tracking, records `backward` on the active
/// tape. The callback receives the output node so it can read its gradient.
template <class Backward>
Tensor emit(Shape shape, std::vector<double> data, bool track, Backward&& backward) {
  Tensor out(std::move(shape), std::move(data), false);
  if (track) {
    out.set_requires_grad(true);
    TensorNode* node = out.node();
    active_tape()->record(out.handle(), [node, fn = std::forward<Backward>(backward)]() { fn(node->grad); });
  }
  return out;
}

inline void require_matrix(const Tensor& t, const char* op) {
  if (!t.defined() || t.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected a matrix, got " +
                         (t.defined() ? shape_string(t.shape()) : std::string("<undefined>")));
  }
}

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
}

}  // namespace grat::ad::detail
