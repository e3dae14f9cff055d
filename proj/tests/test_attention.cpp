#include <gtest/gtest.h>

#include <cmath>

#include "grat/attention/attention.hpp"
#include "grat/attention/encoder.hpp"
#include "grat/graph/transform.hpp"
#include "support.hpp"

using namespace grat;
using namespace grat::graph;
using testkit::random_tensor;

namespace {

attn::Encoder make_encoder(ad::ParamStore& store, Rng& rng, bool pe, bool neighbor_only, std::size_t labels = 11,
                           std::size_t edge_types = 7) {
  attn::EncoderConfig c;
  c.use_positional_encoding = pe;
  c.neighbor_only = neighbor_only;
  return attn::Encoder::create(store, "enc", c, labels, edge_types, 0, 0, rng);
}

}  // namespace

TEST(Attention, FilmMatchesDefinitionPerHead) {
  Rng rng(2);
  const std::size_t nq = 3, nk = 4, d = 6, heads = 2, dk = d / heads;
  const auto q = random_tensor(rng, {nq, d}, 1.0, false);
  const auto k = random_tensor(rng, {nk, d}, 1.0, false);
  const auto v = random_tensor(rng, {nk, d}, 1.0, false);
  const auto gamma = random_tensor(rng, {nq, nk}, 2.0, false);
  const auto beta = random_tensor(rng, {nq, nk}, 2.0, false);
  const auto r = ad::film_attention(q, k, v, gamma, beta, nullptr, heads);
  for (std::size_t h = 0; h < heads; ++h) {
    for (std::size_t i = 0; i < nq; ++i) {
      std::vector<double> w(nk);
      double z = 0.0;
      for (std::size_t j = 0; j < nk; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < dk; ++c) s += q.at(i, h * dk + c) * k.at(j, h * dk + c);
        w[j] = std::exp((gamma.at(i, j) * s + beta.at(i, j)) / std::sqrt(double(dk)));
        z += w[j];
      }
      for (std::size_t j = 0; j < nk; ++j) EXPECT_NEAR(r.weight(h, i, j), w[j] / z, 1e-12);
      for (std::size_t c = 0; c < dk; ++c) {
        double o = 0.0;
        for (std::size_t j = 0; j < nk; ++j) o += w[j] / z * v.at(j, h * dk + c);
        EXPECT_NEAR(r.output.at(i, h * dk + c), o, 1e-12);
      }
    }
  }
}

TEST(Attention, IdentityModulationIsBitwisePlainAttention) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(7);
    const auto q = random_tensor(rng, {n, 8}, 2.0, false);
    const auto k = random_tensor(rng, {n, 8}, 2.0, false);
    const auto v = random_tensor(rng, {n, 8}, 2.0, false);
    const auto ones = ad::Tensor::filled({n, n}, 1.0);
    const auto zeros = ad::Tensor::zeros({n, n});
    const auto a = ad::film_attention(q, k, v, ones, zeros, nullptr, 4);
    const auto b = ad::scaled_dot_attention(q, k, v, nullptr, 4);
    EXPECT_EQ(std::vector<double>(a.output.data().begin(), a.output.data().end()),
              std::vector<double>(b.output.data().begin(), b.output.data().end()));
    EXPECT_EQ(a.weights, b.weights);
  }
}

TEST(Attention, FreshConditionerIsIdentity) {
  Rng rng(4);
  ad::ParamStore store;
  const auto fa = attn::EdgeConditioner::create(store, "fa", 7, 0, 16, 3, rng);
  const std::vector<EdgeTypeId> types = {0, 1, 2, 3, 4, 5, 6, 5, 2};
  const auto film = attn::edge_gamma_beta(fa, types, 3, 3);
  ASSERT_EQ(film.gamma.size(), 3u);
  for (std::size_t l = 0; l < 3; ++l) {
    for (double g : film.gamma[l].data()) EXPECT_EQ(g, 1.0);
    for (double b : film.beta[l].data()) EXPECT_EQ(b, 0.0);
  }
  EXPECT_THROW(attn::edge_gamma_beta(fa, {7}, 1, 1), ContractError);
}

TEST(Attention, ConditionerDependsOnlyOnEdgeType) {
  Rng rng(5);
  ad::ParamStore store;
  const auto fa = attn::EdgeConditioner::create(store, "fa", 7, 0, 16, 2, rng);
  testkit::randomize(store, rng);
  const std::vector<EdgeTypeId> types = {5, 2, 5, 6};
  const auto film = attn::edge_gamma_beta(fa, types, 2, 2);
  for (std::size_t l = 0; l < 2; ++l) {
    EXPECT_EQ(film.gamma[l][0], film.gamma[l][2]);
    EXPECT_EQ(film.beta[l][0], film.beta[l][2]);
    EXPECT_NE(film.gamma[l][0], film.gamma[l][1]);
  }
}

TEST(Attention, NeighborMask) {
  Graph g = Graph::with_labels({8, 9, 10});
  g.set_edge(0, 1, 5);
  const auto open = attn::neighbor_mask(g.edges, 3, false);
  EXPECT_EQ(open, ad::Mask(3, 3, true));
  const auto m = attn::neighbor_mask(g.edges, 3, true);
  EXPECT_TRUE(m(0, 1) && m(1, 0) && m(0, 0) && m(2, 2));
  EXPECT_FALSE(m(0, 2) || m(2, 1));
  const Graph cls = prepend_token(g, token::kCls);
  const auto mc = attn::neighbor_mask(cls.edges, 4, true);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_TRUE(mc(0, j));
}

TEST(Encoder, RowsSumToOneAndNoBondIsBlocked) {
  Rng rng(6);
  ad::ParamStore store;
  const auto enc = make_encoder(store, rng, false, true);
  testkit::randomize(store, rng);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = testkit::random_graph(rng, 1, 8, 3, 2, 0.2);
    const auto out = attn::encode(enc, g);
    for (const auto& att : out.attention) {
      for (std::size_t h = 0; h < att.heads; ++h) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < g.size(); ++j) {
            s += att.weight(h, i, j);
            if (g.edge(i, j) == edge::kNoBond) {
              EXPECT_EQ(att.weight(h, i, j), 0.0);
            }
          }
          EXPECT_NEAR(s, 1.0, 1e-12);
        }
      }
    }
  }
}

TEST(Encoder, PermutationEquivariantWithoutPositions) {
  Rng rng(7);
  ad::ParamStore store;
  const auto enc = make_encoder(store, rng, false, false);
  testkit::randomize(store, rng);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = testkit::random_graph(rng, 2, 8);
    const GraphPermutation pi(rng.permutation(g.size()));
    const auto a = attn::encode(enc, g).hidden;
    const auto b = attn::encode(enc, permute(g, pi)).hidden;
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t c = 0; c < a.cols(); ++c) EXPECT_NEAR(a.at(i, c), b.at(pi(i), c), 1e-9);
    }
  }
}

TEST(Encoder, PositionsBreakSymmetry) {
  Rng rng(8);
  ad::ParamStore store;
  const auto enc = make_encoder(store, rng, true, false);
  // Two identical unbonded nodes can only be told apart by position.
  const Graph g = Graph::with_labels({8, 8});
  const auto h = attn::encode(enc, g).hidden;
  EXPECT_GT(testkit::max_abs_diff(ad::slice_rows(h, 0, 1).data(), ad::slice_rows(h, 1, 1).data()), 1e-6);
}

TEST(Encoder, CapacityAndFeatureChecks) {
  Rng rng(9);
  ad::ParamStore store;
  attn::EncoderConfig c;
  c.max_context = 4;
  const auto enc = attn::Encoder::create(store, "enc", c, 11, 7, 0, 0, rng);
  EXPECT_THROW(attn::encode(enc, Graph::with_labels({8, 8, 8, 8, 8})), CapacityError);
  Graph f = Graph::with_labels({8});
  f.node_feature_dim = 2;
  f.node_features = {1, 2};
  EXPECT_NO_THROW(attn::encode(enc, f));  // features are ignored without a projection

  ad::ParamStore s2;
  const auto with_feat = attn::Encoder::create(s2, "enc", c, 11, 7, 3, 0, rng);
  EXPECT_THROW(attn::encode(with_feat, f), DimensionError);
  c.heads = 5;
  EXPECT_THROW(c.check(), ContractError);
}

TEST(Encoder, NodeFeaturesReachTheOutput) {
  Rng rng(10);
  ad::ParamStore store;
  attn::EncoderConfig c;
  const auto enc = attn::Encoder::create(store, "enc", c, 11, 7, 1, 0, rng);
  Graph a = Graph::with_labels({8, 9});
  a.node_feature_dim = 1;
  a.node_features = {0.0, 0.0};
  Graph b = a;
  b.node_features = {1.0, 0.0};
  const auto ha = attn::encode(enc, a).hidden, hb = attn::encode(enc, b).hidden;
  EXPECT_GT(testkit::max_abs_diff(ha.data(), hb.data()), 1e-6);
}

TEST(Layers, SinusoidalTable) {
  const auto t = attn::sinusoidal_encoding(5, 4);
  EXPECT_EQ(t.at(0, 0), 0.0);
  EXPECT_EQ(t.at(0, 1), 1.0);
  EXPECT_NEAR(t.at(3, 0), std::sin(3.0), 1e-15);
  EXPECT_NEAR(t.at(3, 1), std::cos(3.0), 1e-15);
  EXPECT_NEAR(t.at(3, 2), std::sin(3.0 / 100.0), 1e-15);
  EXPECT_NEAR(t.at(3, 3), std::cos(3.0 / 100.0), 1e-15);
}

TEST(Layers, DropoutOnlyInsideScope) {
  Rng rng(11);
  const auto x = ad::Tensor::filled({10, 10}, 1.0);
  EXPECT_EQ(attn::dropout(x).handle(), x.handle());
  attn::DropoutScope scope(0.5, rng);
  const auto y = attn::dropout(x);
  std::size_t zeros = 0;
  for (double v : y.data()) {
    EXPECT_TRUE(v == 0.0 || v == 2.0);
    zeros += v == 0.0;
  }
  EXPECT_GT(zeros, 20u);
  EXPECT_LT(zeros, 80u);
}
