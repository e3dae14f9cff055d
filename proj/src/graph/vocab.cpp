#include "grat/graph/vocab.hpp"

#include "grat/error.hpp"

namespace grat::graph {

Vocab::Vocab(std::vector<std::string> reserved, const std::vector<std::string>& user)
    : names_(std::move(reserved)), reserved_(names_.size()) {
  names_.insert(names_.end(), user.begin(), user.end());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw ContractError("vocabulary entries must be non-empty");
    if (!index_.emplace(names_[i], i).second) {
      throw ContractError("duplicate vocabulary entry '" + names_[i] + "'");
    }
  }
}

const std::string& Vocab::name(std::size_t id) const {
  if (id >= names_.size()) throw ContractError("vocabulary id " + std::to_string(id) + " out of range");
  return names_[id];
}

std::optional<std::size_t> Vocab::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocab::id(const std::string& name) const {
  auto found = find(name);
  if (!found) throw ContractError("unknown vocabulary entry '" + name + "'");
  return *found;
}

std::vector<std::string> Vocab::user_names() const {
  return std::vector<std::string>(names_.begin() + static_cast<std::ptrdiff_t>(reserved_), names_.end());
}

EdgeTypeVocab::EdgeTypeVocab(const std::vector<std::string>& real_types)
    : Vocab({"no_bond", "virtual", "self", "mask_edge", "no_edge"}, real_types) {}

std::size_t EdgeTypeVocab::class_of(EdgeTypeId id) {
  if (id == edge::kNoBond || id == edge::kNoEdge) return 0;
  if (id < edge::kReservedCount) throw ContractError("edge type " + std::to_string(id) + " has no decoder class");
  return id - edge::kNoEdge;
}

EdgeTypeId EdgeTypeVocab::type_of_class(std::size_t cls) {
  return cls == 0 ? edge::kNoBond : cls + edge::kNoEdge;
}

NodeLabelVocab::NodeLabelVocab(const std::vector<std::string>& labels)
    : Vocab({"<G>", "<EOG>", "<CLS>", "<MASK>", "<PAD>", "<REACTANT>", "<REAGENT>", "<PRODUCT>"}, labels) {}

}  // namespace grat::graph
