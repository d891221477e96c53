#pragma once

#include "nbsc/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace nbsc {

/// Node representatives D^{-1} x_in, one column per structural eigenvalue
/// (descending), each column scaled to unit norm. Only nodes of degree >= 1
/// are represented; `nodes[p]` is the graph node of row p.
struct Embedding {
  Eigen::MatrixXd points;
  Eigen::VectorXd eigenvalues;
  std::vector<int> nodes;
  bool degenerate = false;  ///< some eigenvalues came as an invariant subspace
};

struct EmbeddingOptions {
  double degeneracy_gap = 1e-6;
  bool normalize_columns = true;
};

/// Builds K once and extracts the right eigenvectors for `structural`.
Embedding node_embedding(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& structural,
                         const EmbeddingOptions& opts = {});

struct ClusterAssignment {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  double objective = 0.0;
  std::vector<double> trace;  ///< objective per Lloyd iteration of the winning restart
};

struct KMeansOptions {
  int restarts = 10;
  int max_iter = 300;
  std::uint64_t seed = 0;
};

/// Best of `restarts` runs of k-means++ seeding followed by Lloyd iterations.
ClusterAssignment kmeans(const Eigen::Ref<const Eigen::MatrixXd>& points, int k,
                         const KMeansOptions& opts = {});

/// Within-cluster sum of squared distances to the cluster means.
template <typename Derived>
double k_variance(const Eigen::MatrixBase<Derived>& points, std::span<const int> labels) {
  using Scalar = typename Derived::Scalar;
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sums =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(k, points.cols());
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
  for (Index i = 0; i < points.rows(); ++i) {
    sums.row(labels[i]) += points.row(i);
    ++counts(labels[i]);
  }
  Scalar total = 0;
  for (Index i = 0; i < points.rows(); ++i)
    total += (points.row(i) - sums.row(labels[i]) / Scalar(counts(labels[i]))).squaredNorm();
  return static_cast<double>(total);
}

/// Fraction of positions matched under the best relabeling of `b`
/// (exhaustive for k <= 8, greedy on the confusion matrix above).
double agreement(std::span<const int> a, std::span<const int> b, int k);

/// Row-wise argmax, lowest index on ties.
std::vector<int> argmax_labels(const Eigen::Ref<const Eigen::MatrixXd>& probs);
Eigen::MatrixXd one_hot(std::span<const int> labels, int k);

/// Embedding plus k-means, with labels for every node: degree-0 nodes go to
/// the largest cluster.
ClusterAssignment spectral_clustering(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& structural,
                                      int k, const KMeansOptions& opts = {}, Embedding* embedding = nullptr);

}  // namespace nbsc
