#include "grat/autodiff/params.hpp"

#include "grat/error.hpp"

namespace grat::ad {

Tensor ParamStore::add(const std::string& name, Shape shape, std::vector<double> values) {
  if (params_.count(name)) throw ContractError("duplicate parameter name '" + name + "'");
  Tensor t(std::move(shape), std::move(values), true);
  params_.emplace(name, t);
  return t;
}

const Tensor& ParamStore::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParamStore::total_values() const {
  std::size_t n = 0;
  for (const auto& [name, t] : params_) n += t.numel();
  return n;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, t] : params_) out.push_back(name);
  return out;
}

void ParamStore::zero_grad() {
  for (auto& [name, t] : params_) {
    Tensor handle = t;
    handle.zero_grad();
  }
}

void ParamStore::assign(const std::string& name, const std::vector<double>& values) {
  Tensor t = get(name);
  if (values.size() != t.numel()) {
    throw DimensionError("parameter '" + name + "' has " + std::to_string(t.numel()) + " values, got " +
                         std::to_string(values.size()));
  }
  std::copy(values.begin(), values.end(), t.mutable_data().begin());
}

std::map<std::string, std::vector<double>> ParamStore::snapshot() const {
  std::map<std::string, std::vector<double>> out;
  for (const auto& [name, t] : params_) out.emplace(name, std::vector<double>(t.data().begin(), t.data().end()));
  return out;
}

void ParamStore::restore(const std::map<std::string, std::vector<double>>& values) {
  for (const auto& [name, v] : values) assign(name, v);
}

}  // namespace grat::ad
