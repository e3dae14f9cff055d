#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "grat/autodiff/tensor.hpp"

namespace grat::ad {

/// Named registry of every learnable tensor in a model. Iteration order is
/// the lexicographic name order, which is also the checkpoint order.
class ParamStore {
 public:
  /// Registers a new leaf tensor that requires grad. Names must be unique.
  Tensor add(const std::string& name, Shape shape, std::vector<double> values);

  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  std::size_t size() const { return params_.size(); }
  std::size_t total_values() const;

  const std::map<std::string, Tensor>& items() const { return params_; }
  std::vector<std::string> names() const;

  void zero_grad();

  /// Overwrites values in place (tensors keep their identity).
  void assign(const std::string& name, const std::vector<double>& values);

  /// Deep copy of every value, keyed by name.
  std::map<std::string, std::vector<double>> snapshot() const;
  void restore(const std::map<std::string, std::vector<double>>& values);

 private:
  std::map<std::string, Tensor> params_;
};

}  // namespace grat::ad
