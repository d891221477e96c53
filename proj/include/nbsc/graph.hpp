#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace nbsc {

using Index = Eigen::Index;

/// Undirected edge stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph on nodes 0..n-1.
///
/// Edges are kept once each, normalized to (min, max) and sorted
/// lexicographically; edge k in `edges()` is the undirected edge with id k.
/// Neighbor lists are compressed (CSR) and sorted by neighbor id.
class Graph {
 public:
  Graph() = default;

  int num_nodes() const { return n_; }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& degrees() const { return degrees_; }
  int degree(int i) const { return degrees_[static_cast<std::size_t>(i)]; }

  /// Neighbors of i, ascending.
  std::span<const int> neighbors(int i) const {
    return {adj_.data() + offsets_[i], adj_.data() + offsets_[i + 1]};
  }
  /// Undirected edge ids aligned with `neighbors(i)`.
  std::span<const int> incident_edges(int i) const {
    return {adj_edge_.data() + offsets_[i], adj_edge_.data() + offsets_[i + 1]};
  }

  Eigen::VectorXd degree_vector() const;
  Eigen::SparseMatrix<double> adjacency() const;

  /// Empirical average degree 2m/n (0 for the empty node set).
  double mean_degree() const;

  friend Graph build_graph(int n, std::span<const std::pair<int, int>> edges);

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> degrees_;
  std::vector<Index> offsets_{0};
  std::vector<int> adj_;
  std::vector<int> adj_edge_;
};

/// Validates and builds a graph. Throws ValidationError naming the offending
/// pair on self-loops, duplicates or out-of-range endpoints.
Graph build_graph(int n, std::span<const std::pair<int, int>> edges);
Graph build_graph(int n, std::initializer_list<std::pair<int, int>> edges);

/// Canonical half-edge numbering: ids 0..m-1 are u->v (u<v) in edge order,
/// ids m..2m-1 are the reverses in the same order, so inv swaps the blocks.
struct DirectedEdgeIndex {
  Index count = 0;
  std::vector<int> tail;
  std::vector<int> head;
  std::vector<Index> inv;

  /// Half-edges leaving / entering node i, aligned with Graph::neighbors(i).
  std::vector<Index> out_offsets;
  std::vector<Index> out_edges;
  std::vector<Index> in_edges;

  std::span<const Index> outgoing(int i) const {
    return {out_edges.data() + out_offsets[i], out_edges.data() + out_offsets[i + 1]};
  }
  std::span<const Index> incoming(int i) const {
    return {in_edges.data() + out_offsets[i], in_edges.data() + out_offsets[i + 1]};
  }
};

DirectedEdgeIndex directed_edge_index(const Graph& g);

/// m x m 0-1 adjacency of the line graph: edges adjacent iff they share a node.
Eigen::SparseMatrix<int> line_graph_adjacency(const Graph& g);

/// Node-space projections of an edge vector:
/// out[i] = sum of x over half-edges starting at i, in[i] over those ending at i.
struct InOut {
  Eigen::VectorXd out;
  Eigen::VectorXd in;
};
InOut in_out_project(const DirectedEdgeIndex& index, int num_nodes,
                     const Eigen::Ref<const Eigen::VectorXd>& x);
InOut in_out_project(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& x);

/// 2m x n incidence operators: End(e, head(e)) = 1, Start(e, tail(e)) = 1.
Eigen::SparseMatrix<double> end_matrix(const DirectedEdgeIndex& index, int num_nodes);
Eigen::SparseMatrix<double> start_matrix(const DirectedEdgeIndex& index, int num_nodes);

/// Perron eigenvalue of A by power iteration on A + I from the all-ones vector.
/// Stops once the residual norm drops below `tol`; throws NumericalError after
/// `max_iter` iterations.
double adjacency_top_eigenvalue(const Graph& g, double tol = 1e-10, int max_iter = 10000);

/// Node sets of the connected components, each ascending, ordered by smallest node.
std::vector<std::vector<int>> connected_components(const Graph& g);

/// Nodes of the 2-core (iteratively strip nodes of degree <= 1), ascending.
std::vector<int> two_core(const Graph& g);

/// Subgraph induced by `nodes` (ascending), relabeled 0..|nodes|-1.
Graph induced_subgraph(const Graph& g, std::span<const int> nodes);

}  // namespace nbsc
