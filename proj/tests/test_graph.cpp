#include "doctest.h"
#include "oracles.hpp"

#include "nbsc/error.hpp"
#include "nbsc/graph.hpp"

#include <cmath>

using namespace nbsc;

TEST_CASE("build_graph") {
  SUBCASE("triangle") {
    Graph g = build_graph(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(g.num_edges() == 3);
    CHECK(g.degrees() == std::vector<int>{2, 2, 2});
  }
  SUBCASE("path and normalization") {
    Graph g = build_graph(3, {{1, 0}, {2, 1}});
    CHECK(g.degrees() == std::vector<int>{1, 2, 1});
    CHECK(g.edges()[0] == Edge{0, 1});
    CHECK(g.edges()[1] == Edge{1, 2});
  }
  SUBCASE("rejected inputs") {
    CHECK_THROWS_AS(build_graph(2, {{0, 0}}), ValidationError);
    CHECK_THROWS_AS(build_graph(3, {{0, 1}, {1, 0}}), ValidationError);
    CHECK_THROWS_AS(build_graph(3, {{0, 3}}), ValidationError);
    CHECK_THROWS_WITH_AS(build_graph(2, {{1, 1}}), "self-loop (1, 1)", ValidationError);
  }
  SUBCASE("neighbor lists sorted") {
    Graph g = oracle::random_connected_graph(30, 70, 5);
    long total = 0;
    for (int i = 0; i < g.num_nodes(); ++i) {
      auto nb = g.neighbors(i);
      CHECK(std::is_sorted(nb.begin(), nb.end()));
      CHECK(static_cast<int>(nb.size()) == g.degree(i));
      total += g.degree(i);
    }
    CHECK(total == 2 * g.num_edges());
  }
}

TEST_CASE("directed_edge_index") {
  SUBCASE("triangle block swap") {
    auto idx = directed_edge_index(build_graph(3, {{0, 1}, {1, 2}, {0, 2}}));
    CHECK(idx.count == 6);
    CHECK(idx.inv[0] == 3);
    CHECK(idx.inv[1] == 4);
    CHECK(idx.inv[2] == 5);
  }
  SUBCASE("path") {
    auto idx = directed_edge_index(build_graph(3, {{0, 1}, {1, 2}}));
    CHECK(idx.count == 4);
    CHECK(idx.tail[0] == 0);
    CHECK(idx.head[0] == 1);
  }
  SUBCASE("single edge") {
    auto idx = directed_edge_index(build_graph(2, {{0, 1}}));
    CHECK(idx.inv[0] == 1);
    CHECK(idx.inv[1] == 0);
  }
  SUBCASE("involution invariants") {
    Graph g = oracle::random_connected_graph(25, 60, 11);
    auto idx = directed_edge_index(g);
    for (Index e = 0; e < idx.count; ++e) {
      CHECK(idx.inv[idx.inv[e]] == e);
      CHECK(idx.inv[e] != e);
      CHECK(idx.head[e] == idx.tail[idx.inv[e]]);
    }
    for (int i = 0; i < g.num_nodes(); ++i)
      for (Index e : idx.outgoing(i)) CHECK(idx.tail[e] == i);
  }
}

TEST_CASE("line_graph_adjacency") {
  auto dense = [](const Graph& g) { return Eigen::MatrixXi(line_graph_adjacency(g)); };
  Eigen::MatrixXi ones3 = Eigen::MatrixXi::Ones(3, 3) - Eigen::MatrixXi::Identity(3, 3);
  CHECK(dense(build_graph(3, {{0, 1}, {1, 2}, {0, 2}})) == ones3);
  CHECK(dense(build_graph(4, {{0, 1}, {0, 2}, {0, 3}})) == ones3);
  Eigen::MatrixXi p3(2, 2);
  p3 << 0, 1, 1, 0;
  CHECK(dense(build_graph(3, {{0, 1}, {1, 2}})) == p3);

  Graph g = oracle::random_connected_graph(20, 45, 3);
  Eigen::MatrixXi l = dense(g);
  CHECK(l == l.transpose());
  CHECK(l.diagonal().isZero());
  for (Index k = 0; k < g.num_edges(); ++k) {
    const auto& e = g.edges()[k];
    CHECK(l.row(k).sum() == g.degree(e.u) + g.degree(e.v) - 2);
  }
}

TEST_CASE("in_out_project") {
  Graph tri = build_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  SUBCASE("all ones gives degrees") {
    Graph g = oracle::random_connected_graph(15, 30, 2);
    auto io = in_out_project(g, Eigen::VectorXd::Ones(2 * g.num_edges()));
    CHECK(io.out.isApprox(g.degree_vector()));
    CHECK(io.in.isApprox(g.degree_vector()));
  }
  SUBCASE("indicator of 0->1") {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
    x(0) = 1.0;
    auto io = in_out_project(tri, x);
    CHECK(io.in == Eigen::Vector3d(0, 1, 0));
    CHECK(io.out == Eigen::Vector3d(1, 0, 0));
  }
  SUBCASE("End^T End = Start^T Start = D on P3") {
    Graph p3 = build_graph(3, {{0, 1}, {1, 2}});
    auto idx = directed_edge_index(p3);
    // Columns of End/Start recovered from the projection of basis vectors.
    Eigen::MatrixXd end(4, 3), start(4, 3);
    for (Index e = 0; e < 4; ++e) {
      auto io = in_out_project(idx, 3, Eigen::VectorXd::Unit(4, e));
      end.row(e) = io.in.transpose();
      start.row(e) = io.out.transpose();
    }
    Eigen::MatrixXd expected_end(4, 3), expected_start(4, 3);
    expected_end << 0, 1, 0,  0, 0, 1,  1, 0, 0,  0, 1, 0;
    expected_start << 1, 0, 0,  0, 1, 0,  0, 1, 0,  0, 0, 1;
    CHECK(end == expected_end);
    CHECK(start == expected_start);
    Eigen::MatrixXd d = p3.degree_vector().asDiagonal();
    CHECK((end.transpose() * end) == d);
    CHECK((start.transpose() * start) == d);
    CHECK(Eigen::MatrixXd(end_matrix(idx, 3)) == expected_end);
    CHECK(Eigen::MatrixXd(start_matrix(idx, 3)) == expected_start);
  }
  SUBCASE("sums agree") {
    Graph g = oracle::random_connected_graph(20, 50, 8);
    Rng rng(1);
    Eigen::VectorXd x(2 * g.num_edges());
    for (Index e = 0; e < x.size(); ++e) x(e) = rng.normal();
    auto io = in_out_project(g, x);
    CHECK(io.out.sum() == doctest::Approx(x.sum()).epsilon(1e-12));
    CHECK(io.in.sum() == doctest::Approx(x.sum()).epsilon(1e-12));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(in_out_project(tri, Eigen::VectorXd::Ones(5)), ValidationError);
  }
}

TEST_CASE("adjacency_top_eigenvalue") {
  Graph k4 = build_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  CHECK(adjacency_top_eigenvalue(k4) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(adjacency_top_eigenvalue(build_graph(3, {{0, 1}, {1, 2}, {0, 2}})) ==
        doctest::Approx(2.0).epsilon(1e-10));
  // Path P3 spectrum is 2 cos(pi k / 4), k = 1..3.
  CHECK(std::abs(adjacency_top_eigenvalue(build_graph(3, {{0, 1}, {1, 2}})) -
                 2.0 * std::cos(M_PI / 4.0)) < 1e-9);
  // Ones is already the Perron vector of a regular graph, so use a path.
  const Graph p5 = build_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  CHECK_THROWS_AS(adjacency_top_eigenvalue(p5, 1e-30, 5), NumericalError);
}

TEST_CASE("two_core and components") {
  // Triangle with a pendant path 2-3-4 and an isolated node 5.
  Graph g = build_graph(6, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}});
  CHECK(two_core(g) == std::vector<int>{0, 1, 2});
  auto comps = connected_components(g);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0] == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(comps[1] == std::vector<int>{5});
}
