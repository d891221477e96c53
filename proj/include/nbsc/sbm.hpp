#pragma once

#include "nbsc/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <vector>

namespace nbsc {

/// Stochastic block model with k clusters: proportions r, symmetric
/// affinities C (edge probability beta * c_ab / n) and retention beta.
struct SbmParams {
  int k = 1;
  Eigen::VectorXd r = Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(1, 1);
  double beta = 1.0;

  /// Throws ValidationError unless r is a positive probability vector (sum
  /// within 1e-12), C is k x k symmetric nonnegative and beta in [0, 1].
  void validate() const;

  /// Same model with a different retention probability.
  SbmParams with_beta(double b) const {
    SbmParams p = *this;
    p.beta = b;
    return p;
  }

  /// Equal proportions, c_in on the diagonal and c_out elsewhere.
  static SbmParams symmetric(int k, double c_in, double c_out, double beta = 1.0);
};

/// r = (3/10, 1/3, 11/30) with clusters of unequal expected degree.
SbmParams three_cluster_generic();
/// r = (35, 42, 30)/107, C built so every cluster has the same expected degree.
SbmParams three_cluster_equal_degree();

struct PlantedGraph {
  Graph graph;
  std::vector<int> labels;
  SbmParams params;
  std::vector<int> sizes;
};

/// c_a = sum_b r_b c_ab; multiplied by beta when `apply_beta`.
Eigen::VectorXd cluster_degrees(const SbmParams& p, bool apply_beta = false);
/// c = sum_a r_a c_a.
double average_degree(const SbmParams& p, bool apply_beta = false);

/// R^{1/2} C R^{1/2} at beta = 1.
Eigen::MatrixXd deflated_matrix(const SbmParams& p);

/// Eigenvalues of R C (via the symmetric deflated form), descending, scaled by beta.
Eigen::VectorXd rc_eigenvalues(const SbmParams& p);

/// Row-stochastic transmission matrix T_ab = c_ab r_b / c_a (similar to G R C).
Eigen::MatrixXd transmission_matrix(const SbmParams& p);
/// Real eigenvalues of the transmission matrix, descending (the first is 1).
Eigen::VectorXd transmission_eigenvalues(const SbmParams& p);

/// Expected adjacency for a labeling: entry (i, j) = beta * c_{l(i) l(j)} / n.
Eigen::MatrixXd inflated_matrix(const SbmParams& p, const std::vector<int>& labels);

/// Labels i.i.d. from r, then each pair i<j in row-major order included with
/// probability beta * c_ab / n. Fully determined by `seed`.
PlantedGraph sample_graph(const SbmParams& p, int n, std::uint64_t seed);

/// Keeps edge e iff u_e < beta, where u_e is the e-th uniform of the stream
/// seeded by `seed`. Same seed gives nested edge sets across beta.
PlantedGraph percolate(const PlantedGraph& g, double beta, std::uint64_t seed);
Graph percolate(const Graph& g, double beta, std::uint64_t seed);

struct KestenStigum {
  bool detectable = false;
  double margin = 0.0;  ///< |c_in - c_out| - k sqrt(c)
};
KestenStigum kesten_stigum(double c_in, double c_out, int k);

struct BetaThreshold {
  double beta = std::numeric_limits<double>::infinity();
  bool detectable = false;  ///< false if nu <= 0 or beta > 1
};
/// beta_i = c / nu_i^2 from the beta = 1 model, ascending.
std::vector<BetaThreshold> beta_thresholds(const SbmParams& p);

}  // namespace nbsc
