#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "grat/autodiff/tensor.hpp"

namespace grat::ad {

/// Define-by-run record of differentiable operations.
///
/// Operations record themselves on the tape made active by a TapeScope on
/// the current thread. With no active tape nothing is recorded and results
/// never require grad (inference mode).
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  void record(std::shared_ptr<detail::TensorNode> output, BackwardFn fn);

  /// Seeds d(loss)/d(loss) = 1 and replays every entry once in reverse
  /// order. Gradients accumulate into existing buffers.
  void backward(const Tensor& loss);

  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }

 private:
  struct Entry {
    std::shared_ptr<detail::TensorNode> output;
    BackwardFn fn;
  };
  std::vector<Entry> entries_;
};

/// Makes a tape active on this thread for the lifetime of the scope.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

Tape* active_tape();

/// Runs backward on the active tape. Throws ContractError for a non-scalar
/// loss or when no tape is active.
void backward(const Tensor& loss);

}  // namespace grat::ad
