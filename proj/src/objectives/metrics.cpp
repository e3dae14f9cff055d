#include "grat/objectives/metrics.hpp"

#include <cmath>

#include "grat/error.hpp"

namespace grat::obj {

double std_mae(const std::map<std::string, double>& per_task_mae, const std::map<std::string, double>& per_task_std) {
  if (per_task_mae.empty()) throw ContractError("std_mae: no tasks");
  double total = 0.0;
  for (const auto& [task, mae] : per_task_mae) {
    const auto it = per_task_std.find(task);
    if (it == per_task_std.end()) throw ContractError("std_mae: no standard deviation for task " + task);
    if (!(it->second > 0.0)) throw ContractError("std_mae: standard deviation of task " + task + " is not positive");
    total += mae / it->second;
  }
  return total / static_cast<double>(per_task_mae.size());
}

double log_mae(const std::map<std::string, double>& per_task_mae) {
  if (per_task_mae.empty()) throw ContractError("log_mae: no tasks");
  double total = 0.0;
  for (const auto& [task, mae] : per_task_mae) {
    if (!(mae > 0.0)) throw ContractError("log_mae: MAE of task " + task + " is not positive");
    total += std::log(mae);
  }
  return total / static_cast<double>(per_task_mae.size());
}

bool exact_match(const graph::Graph& pred, const graph::Graph& target) {
  return pred.labels == target.labels && pred.edges == target.edges;
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j;
  j["count"] = count;
  if (!mae.empty()) j["mae"] = mae;
  if (std_mae) j["std_mae"] = *std_mae;
  if (log_mae) j["log_mae"] = *log_mae;
  if (exact_match_rate) {
    j["exact_match"] = *exact_match_rate;
    j["matched"] = matched;
  }
  if (loss) j["loss"] = *loss;
  return j;
}

}  // namespace grat::obj
