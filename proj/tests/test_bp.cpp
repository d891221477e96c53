#include "doctest.h"
#include "oracles.hpp"

#include "nbsc/bp.hpp"
#include "nbsc/cluster.hpp"
#include "nbsc/error.hpp"
#include "nbsc/sbm.hpp"

#include <cmath>

using namespace nbsc;

namespace {

Graph star(int leaves) {
  std::vector<std::pair<int, int>> edges;
  for (int j = 1; j <= leaves; ++j) edges.emplace_back(0, j);
  return build_graph(leaves + 1, edges);
}

}  // namespace

TEST_CASE("init_messages") {
  const Graph g = oracle::random_connected_graph(20, 30, 1);
  const Messages u = init_messages(g, 3, MessageInit::uniform);
  CHECK(u.rows() == 60);
  CHECK((u.array() == 1.0 / 3).all());

  const Messages a = init_messages(g, 3, MessageInit::random, 9);
  const Messages b = init_messages(g, 3, MessageInit::random, 9);
  CHECK(a == b);
  CHECK((a.array() > 0).all());
  CHECK((a.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK(a != init_messages(g, 3, MessageInit::random, 10));

  CHECK_THROWS_AS(init_messages(g, 0, MessageInit::uniform), ValidationError);
}

TEST_CASE("k = 1 messages are identically 1") {
  SbmParams p;
  p.C = Eigen::MatrixXd::Constant(1, 1, 3.0);
  const Graph g = oracle::random_connected_graph(15, 25, 2);
  const BpResult res = bp_run(g, p);
  CHECK(res.converged);
  CHECK((res.messages.array() == 1.0).all());
  CHECK((res.marginals.array() == 1.0).all());
}

TEST_CASE("star leaves send the prior") {
  const SbmParams p = three_cluster_generic();
  const Graph g = star(5);
  const auto idx = directed_edge_index(g);
  const Messages m0 = init_messages(g, 3, MessageInit::random, 4);
  const BpStep st = bp_step(g, idx, m0, p, 0.0, /*field=*/false);
  // Half-edge m + e is leaf -> center; its row is the belief about the leaf.
  for (Index e = 0; e < g.num_edges(); ++e)
    CHECK((st.messages.row(g.num_edges() + e).transpose() - p.r).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("uniform fixed point of symmetric models") {
  for (const bool field : {false, true}) {
    const SbmParams p = SbmParams::symmetric(3, 12, 3);
    const Graph g = sample_graph(p, 200, 5).graph;
    const auto idx = directed_edge_index(g);
    const Messages m0 = init_messages(g, 3, MessageInit::uniform);
    const BpStep st = bp_step(g, idx, m0, p, 0.1, field);
    CHECK(st.max_delta < 1e-12);
    CHECK((st.messages.array() - 1.0 / 3).abs().maxCoeff() < 1e-12);
    const Marginals mg = bp_marginals(g, idx, st.messages, p, field);
    CHECK((mg.array() - 1.0 / 3).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("undetectable model: marginals equal the prior") {
  const SbmParams p = SbmParams::symmetric(2, 5, 5);
  const Graph g = sample_graph(p, 500, 6).graph;
  BpOptions opts;
  opts.seed = 3;
  const BpResult res = bp_run(g, p, opts);
  CHECK(res.converged);
  CHECK((res.marginals.array() - 0.5).abs().maxCoeff() < 1e-8);
}

TEST_CASE("disjoint blocks are recovered exactly") {
  const SbmParams p = SbmParams::symmetric(2, 24, 0);
  const PlantedGraph pg = sample_graph(p, 200, 7);
  REQUIRE(connected_components(pg.graph).size() == 2);
  BpOptions opts;
  opts.seed = 11;
  const BpResult res = bp_run(pg.graph, p, opts);
  CHECK(res.converged);
  CHECK(agreement(pg.labels, argmax_labels(res.marginals), 2) == 1.0);
  CHECK((res.marginals.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("detectable model: rows normalized, labels informative") {
  const SbmParams p = SbmParams::symmetric(2, 16, 4);
  const PlantedGraph pg = sample_graph(p, 600, 8);
  BpOptions opts;
  opts.seed = 2;
  const BpResult res = bp_run(pg.graph, p, opts);
  CHECK((res.messages.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK((res.marginals.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK((res.messages.array() >= 0).all());
  CHECK(agreement(pg.labels, argmax_labels(res.marginals), 2) > 0.9);
}

TEST_CASE("damping mixes old and new") {
  const SbmParams p = SbmParams::symmetric(2, 10, 2);
  const Graph g = sample_graph(p, 100, 9).graph;
  const auto idx = directed_edge_index(g);
  const Messages m0 = init_messages(g, 2, MessageInit::random, 1);
  const BpStep full = bp_step(g, idx, m0, p, 0.0);
  const BpStep half = bp_step(g, idx, m0, p, 0.5);
  CHECK((half.messages - 0.5 * (full.messages + m0)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("an all-zero update row is a numerical failure") {
  // Center 0 hears "surely cluster 0" from leaf 2 and "surely cluster 1" from
  // leaf 3; with no cross-cluster edges nothing is left for 0 -> 1.
  SbmParams p = SbmParams::symmetric(2, 4, 0);
  const Graph g = star(3);
  Messages m = init_messages(g, 2, MessageInit::uniform);
  m.row(4) << 1, 0;
  m.row(5) << 0, 1;
  CHECK_THROWS_AS(bp_step(g, m, p, 0.0, false), NumericalError);
}

TEST_CASE("linear stability") {
  SUBCASE("above Kesten-Stigum") {
    const SbmParams p = SbmParams::symmetric(2, 16, 4);  // c = 10, c lambda^2 = 3.6
    const Stability s = linear_stability(p, asymptotic_spectrum(p, 64));
    CHECK(s.unstable);
    CHECK(s.max_product == doctest::Approx(3.6));
    CHECK(kesten_stigum(16, 4, 2).detectable);
  }
  SUBCASE("below Kesten-Stigum: raw criterion still fires") {
    const SbmParams p = SbmParams::symmetric(2, 10, 6);  // c = 8, c lambda^2 = 0.5
    const Stability s = linear_stability(p, asymptotic_spectrum(p, 64));
    CHECK_FALSE(s.unstable);
    CHECK_FALSE(kesten_stigum(10, 6, 2).detectable);
    CHECK(s.raw_unstable);
    // Largest raw product: the bulk ring (radius sqrt 8) against tau_1 = 1,
    // ahead of mu_1 tau_2 = 8 * 0.25.
    CHECK(s.raw_max_product == doctest::Approx(std::sqrt(8.0)));
  }
  SUBCASE("three clusters") {
    const SbmParams p = SbmParams::symmetric(3, 20, 2);  // c = 8, lambda = 0.75
    const Stability s = linear_stability(p, asymptotic_spectrum(p, 64));
    CHECK(s.unstable);
    CHECK(s.max_product == doctest::Approx(8 * 0.75 * 0.75));
  }
}
