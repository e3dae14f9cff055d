#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "grat/graph/graph.hpp"

namespace grat::obj {

/// Mean over tasks of MAE_t / sigma_t. Throws ContractError for a
/// non-positive sigma, a task without sigma, or no tasks.
double std_mae(const std::map<std::string, double>& per_task_mae, const std::map<std::string, double>& per_task_std);

/// Mean over tasks of ln(MAE_t). Throws ContractError for MAE_t <= 0.
double log_mae(const std::map<std::string, double>& per_task_mae);

/// Labels equal position-wise and edge matrices equal entrywise.
bool exact_match(const graph::Graph& pred, const graph::Graph& target);

struct MetricReport {
  std::map<std::string, double> mae;
  std::optional<double> std_mae;
  std::optional<double> log_mae;
  std::optional<double> exact_match_rate;
  std::optional<double> loss;
  std::size_t count = 0;
  std::size_t matched = 0;

  nlohmann::json to_json() const;
};

}  // namespace grat::obj
