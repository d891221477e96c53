#include "doctest.h"
#include "oracles.hpp"

#include "nbsc/cluster.hpp"
#include "nbsc/error.hpp"
#include "nbsc/nbt.hpp"
#include "nbsc/rng.hpp"
#include "nbsc/sbm.hpp"

#include <cmath>

using namespace nbsc;

namespace {

// Three well-separated Gaussian blobs of 40 points in the plane.
Eigen::MatrixXd blobs(std::vector<int>& truth, std::uint64_t seed) {
  Rng rng(seed);
  const double cx[3] = {0, 10, 0}, cy[3] = {0, 0, 10};
  Eigen::MatrixXd pts(120, 2);
  truth.assign(120, 0);
  for (int i = 0; i < 120; ++i) {
    truth[i] = i / 40;
    pts(i, 0) = cx[truth[i]] + rng.normal();
    pts(i, 1) = cy[truth[i]] + rng.normal();
  }
  return pts;
}

Graph two_k5_bridge() {
  std::vector<std::pair<int, int>> e;
  for (int base : {0, 5})
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) e.emplace_back(base + i, base + j);
  e.emplace_back(4, 5);
  return build_graph(10, e);
}

}  // namespace

TEST_CASE("k_variance") {
  Eigen::MatrixXd pts(4, 1);
  pts << 0, 2, 10, 14;
  const std::vector<int> l{0, 0, 1, 1};
  CHECK(k_variance(pts, l) == doctest::Approx(2.0 + 8.0));
  const std::vector<int> all{0, 0, 0, 0};
  // Mean 6.5: squared deviations 42.25 + 20.25 + 12.25 + 56.25.
  CHECK(k_variance(pts, all) == doctest::Approx(131.0));
  const std::vector<int> own{0, 1, 2, 3};
  CHECK(k_variance(pts, own) == 0.0);
}

TEST_CASE("kmeans on a toy line") {
  Eigen::MatrixXd pts(6, 1);
  pts << 0, 0.1, 0.2, 5, 5.1, 5.2;
  const ClusterAssignment a = kmeans(pts, 2);
  CHECK(a.labels[0] == a.labels[1]);
  CHECK(a.labels[1] == a.labels[2]);
  CHECK(a.labels[3] == a.labels[5]);
  CHECK(a.labels[0] != a.labels[3]);
  CHECK(a.objective == doctest::Approx(4 * 0.01));

  // k = n puts every point alone.
  CHECK(kmeans(pts, 6).objective == 0.0);
  CHECK_THROWS_AS(kmeans(pts, 7), ValidationError);
  CHECK_THROWS_AS(kmeans(pts, 0), ValidationError);
}

TEST_CASE("kmeans on three blobs") {
  std::vector<int> truth;
  const Eigen::MatrixXd pts = blobs(truth, 1);
  KMeansOptions opts;
  opts.seed = 4;
  const ClusterAssignment a = kmeans(pts, 3, opts);
  CHECK(agreement(truth, a.labels, 3) == 1.0);
  CHECK(a.objective == doctest::Approx(k_variance(pts, a.labels)).epsilon(1e-12));
  for (std::size_t t = 1; t < a.trace.size(); ++t) CHECK(a.trace[t] <= a.trace[t - 1] + 1e-12);
  CHECK(a.centers.rows() == 3);
  // Same seed, same answer; more restarts never worse.
  CHECK(kmeans(pts, 3, opts).labels == a.labels);
  opts.restarts = 1;
  CHECK(kmeans(pts, 3, opts).objective >= a.objective - 1e-12);
}

TEST_CASE("Lloyd objective is monotone on random data") {
  Rng rng(5);
  Eigen::MatrixXd pts(200, 3);
  for (Index i = 0; i < pts.size(); ++i) pts.data()[i] = rng.normal();
  for (std::uint64_t s = 0; s < 5; ++s) {
    KMeansOptions opts;
    opts.seed = s;
    opts.restarts = 1;
    const ClusterAssignment a = kmeans(pts, 4, opts);
    for (std::size_t t = 1; t < a.trace.size(); ++t) CHECK(a.trace[t] <= a.trace[t - 1] + 1e-12);
    CHECK(a.objective == doctest::Approx(k_variance(pts, a.labels)).epsilon(1e-12));
  }
}

TEST_CASE("agreement") {
  const std::vector<int> a{0, 0, 1, 1, 2, 2};
  const std::vector<int> b{2, 2, 0, 0, 1, 1};
  CHECK(agreement(a, b, 3) == 1.0);
  const std::vector<int> c{0, 1, 1, 1, 2, 2};
  CHECK(agreement(a, c, 3) == doctest::Approx(5.0 / 6));
  CHECK(agreement(c, a, 3) == doctest::Approx(5.0 / 6));

  // Invariant under any relabeling of either argument.
  Rng rng(6);
  std::vector<int> x(300), y(300);
  for (int i = 0; i < 300; ++i) {
    x[i] = static_cast<int>(rng.below(4));
    y[i] = rng.uniform() < 0.7 ? x[i] : static_cast<int>(rng.below(4));
  }
  const double base = agreement(x, y, 4);
  const std::vector<int> perm{3, 1, 0, 2};
  std::vector<int> py(300);
  for (int i = 0; i < 300; ++i) py[i] = perm[y[i]];
  CHECK(agreement(x, py, 4) == base);
  CHECK(agreement(py, x, 4) == base);
  CHECK(base >= 0.7);

  const std::vector<int> shorter{0, 1};
  CHECK_THROWS_AS(agreement(a, shorter, 3), ValidationError);
}

TEST_CASE("argmax_labels and one_hot") {
  Eigen::MatrixXd p(3, 3);
  p << 0.2, 0.5, 0.3, 0.4, 0.4, 0.2, 0.1, 0.1, 0.8;
  CHECK(argmax_labels(p) == std::vector<int>{1, 0, 2});
  const std::vector<int> l{1, 0, 2};
  CHECK(argmax_labels(one_hot(l, 3)) == l);
  CHECK(one_hot(l, 3).sum() == 3.0);
}

TEST_CASE("node embedding and spectral clustering: two K5 joined by a bridge") {
  const Graph g = two_k5_bridge();
  const Eigen::VectorXd mu = structural_eigenvalues(spectrum_B_via_ihara(g), g.mean_degree());
  REQUIRE(mu.size() >= 2);
  Embedding emb;
  const ClusterAssignment a = spectral_clustering(g, mu.head(2), 2, {}, &emb);
  CHECK(emb.points.rows() == 10);
  CHECK(emb.points.cols() == 2);
  for (Index j = 0; j < 2; ++j) CHECK(emb.points.col(j).norm() == doctest::Approx(1.0));
  const std::vector<int> truth{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  CHECK(agreement(truth, a.labels, 2) == 1.0);
  // The second eigenvector separates the cliques by sign.
  for (int i = 0; i < 5; ++i) CHECK(emb.points(i, 1) * emb.points(9 - i, 1) < 0);
}

TEST_CASE("spectral clustering on a planted graph") {
  const PlantedGraph pg = sample_graph(SbmParams::symmetric(3, 30, 3), 450, 12);
  const Eigen::VectorXd mu = structural_eigenvalues(spectrum_B_via_ihara(pg.graph), pg.graph.mean_degree());
  // At n = 450 a real bulk eigenvalue near 4 can clear the cutoff; keep the top k.
  REQUIRE(mu.size() >= 3);
  CHECK(mu(2) > 6.0);
  const ClusterAssignment a = spectral_clustering(pg.graph, mu.head(3), 3);
  CHECK(agreement(pg.labels, a.labels, 3) > 0.9);
  CHECK(a.labels.size() == 450u);
}

TEST_CASE("isolated nodes join the largest cluster") {
  // Two triangles plus an isolated node 6; the first triangle has a pendant.
  const Graph g = build_graph(8, {{0, 1}, {1, 2}, {0, 2}, {2, 7}, {3, 4}, {4, 5}, {3, 5}});
  Eigen::VectorXd mu(1);
  mu << spectrum_B_via_ihara(g).values(0).real();
  Embedding emb;
  const ClusterAssignment a = spectral_clustering(g, mu, 1, {}, &emb);
  CHECK(emb.nodes.size() == 7u);
  CHECK(a.labels[6] == 0);
}
