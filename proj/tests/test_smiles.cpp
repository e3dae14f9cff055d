#include <gtest/gtest.h>

#include "grat/graph/transform.hpp"
#include "grat/smiles/smiles_lite.hpp"
#include "smiles_corpus.hpp"
#include "support.hpp"

using namespace grat;
using namespace grat::graph;
using smiles::parse_smiles_lite;
using smiles::write_smiles_lite;

namespace {

const Vocabularies& mol() {
  static const Vocabularies v = smiles::molecule_vocabularies();
  return v;
}
LabelId atom(const char* s) { return mol().nodes.id(s); }
EdgeTypeId bond(const char* s) { return mol().edges.id(s); }

std::size_t error_offset(const std::string& s) {
  try {
    parse_smiles_lite(s, mol());
  } catch (const smiles::SmilesError& e) {
    return e.offset();
  }
  return SIZE_MAX;
}

}  // namespace

TEST(Smiles, AceticAcidByHand) {
  const Graph g = parse_smiles_lite("CC(=O)O", mol());
  EXPECT_EQ(g.labels, (std::vector<LabelId>{atom("C"), atom("C"), atom("O"), atom("O")}));
  EXPECT_EQ(g.edge(0, 1), bond("single"));
  EXPECT_EQ(g.edge(1, 2), bond("double"));
  EXPECT_EQ(g.edge(1, 3), bond("single"));
  EXPECT_EQ(g.edge(2, 3), edge::kNoBond);
  EXPECT_EQ(g.bond_count(), 3u);
}

TEST(Smiles, RingClosureByHand) {
  const Graph g = parse_smiles_lite("C1CC1", mol());
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(g.edge(0, 2), bond("single"));
  EXPECT_EQ(g.bond_count(), 3u);

  const Graph b = parse_smiles_lite("C1=CC=CC=C1", mol());
  EXPECT_EQ(b.edge(0, 1), bond("double"));
  EXPECT_EQ(b.edge(1, 2), bond("single"));
  EXPECT_EQ(b.edge(5, 0), bond("single"));
  EXPECT_EQ(b.edge(4, 5), bond("double"));

  // The bond symbol may sit on either side of a closing digit.
  EXPECT_EQ(parse_smiles_lite("C=1CC1", mol()).edge(0, 2), bond("double"));
  EXPECT_EQ(parse_smiles_lite("C1CC=1", mol()).edge(0, 2), bond("double"));
}

TEST(Smiles, TwoLetterAtomsAndTripleBonds) {
  const Graph g = parse_smiles_lite("ClC#N", mol());
  EXPECT_EQ(g.labels, (std::vector<LabelId>{atom("Cl"), atom("C"), atom("N")}));
  EXPECT_EQ(g.edge(1, 2), bond("triple"));
}

TEST(Smiles, WriterIsCanonicalOnSimpleInputs) {
  for (const char* s : {"C", "C=O", "C1CC1", "CC(=O)O", "CC(C)(C)C", "C1CCC2CCCCC2C1"}) {
    EXPECT_EQ(write_smiles_lite(parse_smiles_lite(s, mol()), mol()), s);
  }
}

TEST(Smiles, CorpusRoundTripIsIsomorphic) {
  ASSERT_EQ(testkit::smiles_corpus().size(), 50u);
  for (const auto& s : testkit::smiles_corpus()) {
    const Graph g = parse_smiles_lite(s, mol());
    ASSERT_TRUE(validate(g).empty()) << s;
    const std::string w = write_smiles_lite(g, mol());
    EXPECT_TRUE(testkit::isomorphic(parse_smiles_lite(w, mol()), g)) << s << " -> " << w;
  }
}

TEST(Smiles, WriterHandlesAnyNodeOrder) {
  Rng rng(4);
  for (const auto& s : testkit::smiles_corpus()) {
    const Graph g = parse_smiles_lite(s, mol());
    const Graph p = permute(g, GraphPermutation(rng.permutation(g.size())));
    EXPECT_TRUE(testkit::isomorphic(parse_smiles_lite(write_smiles_lite(p, mol()), mol()), g)) << s;
  }
}

TEST(Smiles, ErrorsPointAtTheOffendingByte) {
  EXPECT_EQ(error_offset(""), 0u);
  EXPECT_EQ(error_offset("CXC"), 1u);
  EXPECT_EQ(error_offset("c1ccccc1"), 0u);
  EXPECT_EQ(error_offset("C(C"), 1u);
  EXPECT_EQ(error_offset("CC)"), 2u);
  EXPECT_EQ(error_offset("C1CC"), 1u);
  EXPECT_EQ(error_offset("C=="), 2u);
  EXPECT_EQ(error_offset("C="), 1u);
  EXPECT_EQ(error_offset("=C"), 0u);
  EXPECT_EQ(error_offset("C()"), 2u);
  EXPECT_EQ(error_offset("C11"), 2u);
  EXPECT_EQ(error_offset("[NH4+]"), 0u);
}

TEST(Smiles, WriterRejectsUnsupportedGraphs) {
  const Graph two = Graph::with_labels({atom("C"), atom("C")});
  EXPECT_THROW(write_smiles_lite(two, mol()), smiles::UnsupportedGraphError);
  EXPECT_THROW(write_smiles_lite(Graph(), mol()), smiles::UnsupportedGraphError);

  // Ten independent rings on one atom cannot all be open at once.
  std::string s = "C";
  for (int i = 0; i < 10; ++i) s += "(C1CC1)";
  const Graph many = parse_smiles_lite(s, mol());
  EXPECT_NO_THROW(write_smiles_lite(many, mol()));
}
