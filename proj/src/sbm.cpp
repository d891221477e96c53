#include "nbsc/sbm.hpp"

#include "nbsc/error.hpp"
#include "nbsc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nbsc {

void SbmParams::validate() const {
  if (k < 1) throw ValidationError("cluster count must be at least 1");
  if (r.size() != k) throw ValidationError("proportion vector must have length k");
  if (C.rows() != k || C.cols() != k) throw ValidationError("affinity matrix must be k x k");
  if ((r.array() <= 0).any()) throw ValidationError("cluster proportions must be positive");
  if (std::abs(r.sum() - 1.0) > 1e-12) throw ValidationError("cluster proportions must sum to 1");
  if ((C.array() < 0).any()) throw ValidationError("affinities must be nonnegative");
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 0)
    throw ValidationError("affinity matrix must be symmetric");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ValidationError("beta must lie in [0, 1]");
}

SbmParams SbmParams::symmetric(int k, double c_in, double c_out, double beta) {
  SbmParams p;
  p.k = k;
  p.r = Eigen::VectorXd::Constant(k, 1.0 / k);
  p.C = Eigen::MatrixXd::Constant(k, k, c_out);
  p.C.diagonal().setConstant(c_in);
  p.beta = beta;
  return p;
}

SbmParams three_cluster_generic() {
  SbmParams p;
  p.k = 3;
  p.r.resize(3);
  p.r << 3.0 / 10.0, 1.0 / 3.0, 11.0 / 30.0;
  p.C.resize(3, 3);
  p.C << 30, 12, 10,
         12, 32, 9,
         10, 9, 27;
  return p;
}

SbmParams three_cluster_equal_degree() {
  SbmParams p;
  p.k = 3;
  p.r.resize(3);
  p.r << 35.0 / 107.0, 42.0 / 107.0, 30.0 / 107.0;
  p.C.resize(3, 3);
  p.C << 30, 11.28, 7.728,
         11.28, 25, 10.36,
         7.728, 10.36, 35;
  return p;
}

Eigen::VectorXd cluster_degrees(const SbmParams& p, bool apply_beta) {
  Eigen::VectorXd c = p.C * p.r;
  return apply_beta ? Eigen::VectorXd(p.beta * c) : c;
}

double average_degree(const SbmParams& p, bool apply_beta) {
  return p.r.dot(cluster_degrees(p, apply_beta));
}

Eigen::MatrixXd deflated_matrix(const SbmParams& p) {
  const Eigen::VectorXd s = p.r.cwiseSqrt();
  return s.asDiagonal() * p.C * s.asDiagonal();
}

Eigen::VectorXd rc_eigenvalues(const SbmParams& p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(deflated_matrix(p), Eigen::EigenvaluesOnly);
  return p.beta * es.eigenvalues().reverse();
}

namespace {

Eigen::VectorXd positive_cluster_degrees(const SbmParams& p) {
  Eigen::VectorXd c = cluster_degrees(p);
  for (Index a = 0; a < c.size(); ++a)
    if (!(c(a) > 0))
      throw ValidationError("cluster " + std::to_string(a) + " has zero expected degree");
  return c;
}

}  // namespace

Eigen::MatrixXd transmission_matrix(const SbmParams& p) {
  const Eigen::VectorXd c = positive_cluster_degrees(p);
  return c.cwiseInverse().asDiagonal() * p.C * p.r.asDiagonal();
}

Eigen::VectorXd transmission_eigenvalues(const SbmParams& p) {
  // diag(sqrt(r_a c_a)) symmetrizes T = G C R.
  const Eigen::VectorXd w = p.r.cwiseQuotient(positive_cluster_degrees(p)).cwiseSqrt();
  const Eigen::MatrixXd s = w.asDiagonal() * p.C * w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

Eigen::MatrixXd inflated_matrix(const SbmParams& p, const std::vector<int>& labels) {
  const auto n = static_cast<Index>(labels.size());
  Eigen::MatrixXd a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = p.beta * p.C(labels[i], labels[j]) / n;
  return a;
}

PlantedGraph sample_graph(const SbmParams& p, int n, std::uint64_t seed) {
  p.validate();
  if (n < 0) throw ValidationError("node count must be nonnegative");
  if (n > 0 && p.beta * p.C.maxCoeff() / n > 1.0)
    throw ValidationError("edge probability beta * c_ab / n exceeds 1");

  Rng rng(seed);
  PlantedGraph out;
  out.params = p;
  out.labels.resize(static_cast<std::size_t>(n));
  out.sizes.assign(static_cast<std::size_t>(p.k), 0);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    double acc = 0.0;
    int a = p.k - 1;
    for (int b = 0; b < p.k; ++b) {
      acc += p.r(b);
      if (u < acc) {
        a = b;
        break;
      }
    }
    out.labels[i] = a;
    ++out.sizes[a];
  }

  const Eigen::MatrixXd prob = p.beta * p.C / std::max(n, 1);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < prob(out.labels[i], out.labels[j])) edges.emplace_back(i, j);
  out.graph = build_graph(n, edges);
  return out;
}

Graph percolate(const Graph& g, double beta, std::uint64_t seed) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ValidationError("beta must lie in [0, 1]");
  Rng rng(seed);
  std::vector<std::pair<int, int>> kept;
  kept.reserve(g.edges().size());
  for (const auto& e : g.edges())
    if (rng.uniform() < beta) kept.emplace_back(e.u, e.v);
  return build_graph(g.num_nodes(), kept);
}

PlantedGraph percolate(const PlantedGraph& g, double beta, std::uint64_t seed) {
  PlantedGraph out = g;
  out.graph = percolate(g.graph, beta, seed);
  out.params.beta = g.params.beta * beta;
  return out;
}

KestenStigum kesten_stigum(double c_in, double c_out, int k) {
  const double c = (c_in + (k - 1) * c_out) / k;
  KestenStigum ks;
  ks.margin = std::abs(c_in - c_out) - k * std::sqrt(c);
  ks.detectable = ks.margin > 0;
  return ks;
}

std::vector<BetaThreshold> beta_thresholds(const SbmParams& p) {
  const SbmParams base = p.with_beta(1.0);
  const double c = average_degree(base);
  const Eigen::VectorXd nu = rc_eigenvalues(base);
  std::vector<BetaThreshold> out;
  for (Index i = 0; i < nu.size(); ++i) {
    BetaThreshold t;
    if (nu(i) > 0) {
      t.beta = c / (nu(i) * nu(i));
      t.detectable = t.beta <= 1.0;
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace nbsc
