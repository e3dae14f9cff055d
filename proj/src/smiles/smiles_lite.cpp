#include "grat/smiles/smiles_lite.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <vector>

namespace grat::smiles {

using graph::EdgeTypeId;
using graph::Graph;
using graph::LabelId;

namespace {

constexpr std::array<const char*, 10> kAtoms{"C", "N", "O", "F", "S", "P", "Cl", "Br", "I", "H"};
constexpr std::array<const char*, 3> kBondNames{"single", "double", "triple"};

int bond_order(char c) {
  switch (c) {
    case '-': return 1;
    case '=': return 2;
    case '#': return 3;
    default: return 0;
  }
}

struct PendingBond {
  std::size_t atom;
  int order;  // 0 = unspecified
  std::size_t offset;
};

class Parser {
 public:
  Parser(std::string_view text, const graph::Vocabularies& vocab) : text_(text), vocab_(vocab) {
    for (int order = 1; order <= 3; ++order) {
      auto id = vocab.edges.find(kBondNames[order - 1]);
      if (!id) throw ContractError(std::string("vocabulary lacks bond type '") + kBondNames[order - 1] + "'");
      bond_type_[order] = *id;
    }
  }

  Graph run() {
    if (text_.empty()) throw SmilesError(0, "empty string");
    while (pos_ < text_.size()) step();
    if (pending_bond_) throw SmilesError(pending_bond_offset_, "bond symbol not followed by an atom");
    if (!branches_.empty()) throw SmilesError(branches_.back().second, "unclosed branch '('");
    for (std::size_t d = 0; d < rings_.size(); ++d) {
      if (rings_[d]) throw SmilesError(rings_[d]->offset, "ring digit " + std::to_string(d) + " never closed");
    }
    Graph g = Graph::with_labels(labels_);
    for (const auto& [a, b, order] : bonds_) g.set_edge(a, b, bond_type_[order]);
    return g;
  }

 private:
  void step() {
    const char c = text_[pos_];
    if (bond_order(c)) {
      if (!current_) throw SmilesError(pos_, "bond symbol before any atom");
      if (pending_bond_) throw SmilesError(pos_, "two consecutive bond symbols");
      pending_bond_ = bond_order(c);
      pending_bond_offset_ = pos_;
      ++pos_;
      return;
    }
    if (c == '(') {
      if (!current_) throw SmilesError(pos_, "branch before any atom");
      if (pending_bond_) throw SmilesError(pos_, "bond symbol before '('");
      branches_.emplace_back(*current_, pos_);
      branch_open_ = true;
      ++pos_;
      return;
    }
    if (c == ')') {
      if (branches_.empty()) throw SmilesError(pos_, "unbalanced ')'");
      if (pending_bond_) throw SmilesError(pos_, "bond symbol before ')'");
      if (branch_open_) throw SmilesError(pos_, "empty branch");
      current_ = branches_.back().first;
      branches_.pop_back();
      ++pos_;
      return;
    }
    if (c >= '1' && c <= '9') {
      ring_digit(static_cast<std::size_t>(c - '0'));
      return;
    }
    atom();
  }

  void atom() {
    std::optional<std::string> symbol;
    if (pos_ + 1 < text_.size()) {
      const std::string_view two = text_.substr(pos_, 2);
      if (two == "Cl" || two == "Br") symbol = std::string(two);
    }
    if (!symbol) {
      for (const char* a : kAtoms) {
        if (text_[pos_] == a[0] && a[1] == '\0') symbol = std::string(1, text_[pos_]);
      }
    }
    if (!symbol) throw SmilesError(pos_, std::string("unknown token '") + text_[pos_] + "'");
    auto label = vocab_.nodes.find(*symbol);
    if (!label) throw SmilesError(pos_, "atom '" + *symbol + "' missing from the label vocabulary");

    const std::size_t index = labels_.size();
    labels_.push_back(*label);
    if (current_) bonds_.push_back({*current_, index, pending_bond_ ? pending_bond_ : 1});
    pending_bond_ = 0;
    current_ = index;
    branch_open_ = false;
    pos_ += symbol->size();
  }

  void ring_digit(std::size_t digit) {
    if (!current_) throw SmilesError(pos_, "ring digit before any atom");
    if (branch_open_) throw SmilesError(pos_, "ring digit directly after '('");
    auto& slot = rings_[digit];
    if (!slot) {
      slot = PendingBond{*current_, pending_bond_, pos_};
    } else {
      const std::size_t other = slot->atom;
      if (other == *current_) throw SmilesError(pos_, "ring closure onto the same atom");
      for (const auto& [a, b, order] : bonds_) {
        if ((a == other && b == *current_) || (a == *current_ && b == other)) {
          throw SmilesError(pos_, "ring closure duplicates an existing bond");
        }
      }
      int order = pending_bond_ ? pending_bond_ : slot->order;
      if (pending_bond_ && slot->order && pending_bond_ != slot->order) {
        throw SmilesError(pos_, "conflicting ring-closure bond symbols");
      }
      bonds_.push_back({other, *current_, order ? order : 1});
      slot.reset();
    }
    pending_bond_ = 0;
    ++pos_;
  }

  struct Bond {
    std::size_t a, b;
    int order;
  };

  std::string_view text_;
  const graph::Vocabularies& vocab_;
  std::array<EdgeTypeId, 4> bond_type_{};
  std::size_t pos_ = 0;
  std::vector<LabelId> labels_;
  std::vector<Bond> bonds_;
  std::optional<std::size_t> current_;
  int pending_bond_ = 0;
  std::size_t pending_bond_offset_ = 0;
  bool branch_open_ = false;
  std::vector<std::pair<std::size_t, std::size_t>> branches_;  // (atom, offset)
  std::array<std::optional<PendingBond>, 10> rings_{};
};

}  // namespace

graph::Vocabularies molecule_vocabularies() {
  std::vector<std::string> atoms(kAtoms.begin(), kAtoms.end());
  std::vector<std::string> bonds(kBondNames.begin(), kBondNames.end());
  return graph::Vocabularies{graph::NodeLabelVocab(atoms), graph::EdgeTypeVocab(bonds)};
}

Graph parse_smiles_lite(std::string_view text, const graph::Vocabularies& vocab) {
  return Parser(text, vocab).run();
}

std::string write_smiles_lite(const Graph& g, const graph::Vocabularies& vocab) {
  const std::size_t n = g.size();
  if (n == 0) throw UnsupportedGraphError("empty graph has no line notation");

  std::array<std::optional<EdgeTypeId>, 4> type_of_order{};
  for (int order = 1; order <= 3; ++order) type_of_order[order] = vocab.edges.find(kBondNames[order - 1]);
  auto bond_symbol = [&](EdgeTypeId type) -> std::string {
    for (int order = 1; order <= 3; ++order) {
      if (type_of_order[order] && *type_of_order[order] == type) return order == 1 ? "" : (order == 2 ? "=" : "#");
    }
    throw UnsupportedGraphError("edge type '" + vocab.edges.name(type) + "' is not a single/double/triple bond");
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::string& name = vocab.nodes.name(g.labels[i]);
    bool ok = false;
    for (const char* a : kAtoms) ok = ok || name == a;
    if (!ok) throw UnsupportedGraphError("label '" + name + "' is outside the atom subset");
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && g.edge(i, j) != graph::edge::kNoBond) bond_symbol(g.edge(i, j));
    }
  }

  // Depth-first tree from node 0; every non-tree bond closes a ring.
  std::vector<std::size_t> parent(n, n), preorder;
  std::vector<std::vector<std::size_t>> children(n);
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> rank(n, n);
  auto visit = [&](auto&& self, std::size_t u) -> void {
    seen[u] = true;
    rank[u] = preorder.size();
    preorder.push_back(u);
    for (std::size_t v = 0; v < n; ++v) {
      if (v == u || g.edge(u, v) == graph::edge::kNoBond || seen[v]) continue;
      parent[v] = u;
      children[u].push_back(v);
      self(self, v);
    }
  };
  visit(visit, 0);
  if (preorder.size() != n) throw UnsupportedGraphError("graph is disconnected");

  // ring_opens[u]: closures opened at u (partner later in preorder).
  std::vector<std::vector<std::size_t>> ring_opens(n), ring_closes(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      if (g.edge(u, v) == graph::edge::kNoBond || parent[v] == u || parent[u] == v) continue;
      const std::size_t first = rank[u] < rank[v] ? u : v;
      const std::size_t second = first == u ? v : u;
      ring_opens[first].push_back(second);
      ring_closes[second].push_back(first);
    }
  for (auto& list : ring_opens) std::sort(list.begin(), list.end(), [&](auto a, auto b) { return rank[a] < rank[b]; });
  for (auto& list : ring_closes) std::sort(list.begin(), list.end(), [&](auto a, auto b) { return rank[a] < rank[b]; });

  std::array<bool, 10> digit_used{};
  std::map<std::pair<std::size_t, std::size_t>, int> digit_of;
  std::string out;
  auto emit_atom = [&](auto&& self, std::size_t u) -> void {
    out += vocab.nodes.name(g.labels[u]);
    for (std::size_t partner : ring_closes[u]) {
      const int d = digit_of.at({partner, u});
      out += bond_symbol(g.edge(u, partner)) + std::to_string(d);
      digit_used[d] = false;
    }
    for (std::size_t partner : ring_opens[u]) {
      int d = 1;
      while (d <= 9 && digit_used[d]) ++d;
      if (d > 9) throw UnsupportedGraphError("more than nine rings open at once");
      digit_used[d] = true;
      digit_of[{u, partner}] = d;
      out += bond_symbol(g.edge(u, partner)) + std::to_string(d);
    }
    for (std::size_t k = 0; k < children[u].size(); ++k) {
      const std::size_t v = children[u][k];
      const bool last = k + 1 == children[u].size();
      if (!last) out += '(';
      out += bond_symbol(g.edge(u, v));
      self(self, v);
      if (!last) out += ')';
    }
  };
  emit_atom(emit_atom, 0);
  return out;
}

}  // namespace grat::smiles
