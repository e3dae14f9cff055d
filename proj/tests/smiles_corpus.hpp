#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "grat/graph/graph.hpp"

namespace grat::testkit {

// Hand-written strings in the supported subset; several have nested
// branches, fused rings and reused ring digits.
inline const std::vector<std::string>& smiles_corpus() {
  static const std::vector<std::string> corpus = {
      "C",
      "C=O",
      "C1CC1",
      "CC(=O)O",
      "CC(C)(C)C",
      "CC(C(C)O)N",
      "CC(C(C(C)F)Cl)Br",
      "C#N",
      "C#CC",
      "O=C=O",
      "N#CC#N",
      "CCO",
      "CCN(CC)CC",
      "C1CCCCC1",
      "C1CCC2CCCCC2C1",
      "C1CC2CC1CC2",
      "C1=CC=CC=C1",
      "C1=CC=C(C=C1)O",
      "OC(=O)C(N)CS",
      "CC(=O)OC1=CC=CC=C1C(=O)O",
      "ClC(Cl)(Cl)Cl",
      "FC(F)(F)C(F)(F)F",
      "BrCCBr",
      "ICI",
      "P(=O)(O)(O)O",
      "S(=O)(=O)(O)O",
      "CSC",
      "C1CCOC1",
      "C1CCNCC1",
      "N1C=CC=C1",
      "CC(C)CC(C)(C)C",
      "C(C(C(C(C)C)C)C)C",
      "CC1(C)CC1",
      "C1CC1C1CC1",
      "C12CC1CC2",
      "C1C2CC3CC1CC(C2)C3",
      "OCC(O)CO",
      "NCC(=O)O",
      "CC(N)C(=O)O",
      "C=CC=C",
      "CC#CC",
      "C(=O)(N)N",
      "HC#CH",
      "HOH",
      "CN1CCC(CC1)O",
      "C1CC(CC(C1)Cl)Br",
      "OC1CC(O)C(O)C1O",
      "CC(=C)C(=O)OC",
      "N#CC1=CC=CC=C1",
      "C(CC(C(=O)O)N)CN",
  };
  return corpus;
}

/// Backtracking isomorphism test that respects labels and edge types.
inline bool isomorphic(const graph::Graph& a, const graph::Graph& b) {
  const std::size_t n = a.size();
  if (n != b.size() || a.bond_count() != b.bond_count()) return false;
  std::vector<std::size_t> map(n);
  std::vector<bool> used(n, false);
  std::function<bool(std::size_t)> place = [&](std::size_t i) {
    if (i == n) return true;
    for (std::size_t c = 0; c < n; ++c) {
      if (used[c] || a.labels[i] != b.labels[c]) continue;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) ok = a.edge(i, j) == b.edge(c, map[j]);
      if (!ok) continue;
      used[c] = true;
      map[i] = c;
      if (place(i + 1)) return true;
      used[c] = false;
    }
    return false;
  };
  return place(0);
}

}  // namespace grat::testkit
