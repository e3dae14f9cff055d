#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "grat/error.hpp"
#include "grat/graph/graph.hpp"
#include "grat/graph/jsonl.hpp"

// Strict subset of SMILES: organic-subset atoms C N O F S P Cl Br I H
// (uppercase, no brackets), bonds - = #, branches and ring-closure digits
// 1-9. No aromaticity, charges, isotopes, stereo or implicit hydrogens.
namespace grat::smiles {

class SmilesError : public Error {
 public:
  SmilesError(std::size_t offset, const std::string& what)
      : Error("byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Graph cannot be expressed in the subset (disconnected, unknown label or
/// bond type, more than nine simultaneously open rings).
class UnsupportedGraphError : public Error {
 public:
  using Error::Error;
};

/// Node labels are the ten subset atoms; edge types single/double/triple.
graph::Vocabularies molecule_vocabularies();

/// Nodes come out in first-appearance order.
graph::Graph parse_smiles_lite(std::string_view text, const graph::Vocabularies& vocab);

/// Depth-first walk from node 0, lower-index neighbours first; ring-closure
/// digits take the lowest free digit at the moment a ring opens.
std::string write_smiles_lite(const graph::Graph& g, const graph::Vocabularies& vocab);

}  // namespace grat::smiles
