#include "nbsc/graph.hpp"

#include "nbsc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace nbsc {

namespace {

std::string pair_text(int a, int b) {
  std::ostringstream os;
  os << "(" << a << ", " << b << ")";
  return os.str();
}

}  // namespace

Graph build_graph(int n, std::span<const std::pair<int, int>> edges) {
  if (n < 0) throw ValidationError("negative node count");
  Graph g;
  g.n_ = n;
  g.edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n)
      throw ValidationError("edge " + pair_text(a, b) + " has an endpoint outside [0, " +
                            std::to_string(n) + ")");
    if (a == b) throw ValidationError("self-loop " + pair_text(a, b));
    g.edges_.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  auto dup = std::adjacent_find(g.edges_.begin(), g.edges_.end());
  if (dup != g.edges_.end())
    throw ValidationError("duplicate edge " + pair_text(dup->u, dup->v));

  g.degrees_.assign(static_cast<std::size_t>(n), 0);
  for (const auto& e : g.edges_) {
    ++g.degrees_[static_cast<std::size_t>(e.u)];
    ++g.degrees_[static_cast<std::size_t>(e.v)];
  }
  g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + g.degrees_[i];

  // Filling in edge order yields ascending neighbor lists: for fixed i the
  // neighbors j < i arrive sorted by j, then those j > i sorted by j.
  g.adj_.resize(2 * g.edges_.size());
  g.adj_edge_.resize(2 * g.edges_.size());
  std::vector<Index> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < g.edges_.size(); ++k) {
      const auto& e = g.edges_[k];
      // pass 0 inserts lower neighbors (v sees u), pass 1 upper ones (u sees v).
      const int owner = pass == 0 ? e.v : e.u;
      const int other = pass == 0 ? e.u : e.v;
      g.adj_[fill[owner]] = other;
      g.adj_edge_[fill[owner]] = static_cast<int>(k);
      ++fill[owner];
    }
  }
  return g;
}

Graph build_graph(int n, std::initializer_list<std::pair<int, int>> edges) {
  return build_graph(n, std::span<const std::pair<int, int>>(edges.begin(), edges.size()));
}

Eigen::VectorXd Graph::degree_vector() const {
  Eigen::VectorXd d(n_);
  for (int i = 0; i < n_; ++i) d(i) = degrees_[i];
  return d;
}

Eigen::SparseMatrix<double> Graph::adjacency() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * edges_.size());
  for (const auto& e : edges_) {
    t.emplace_back(e.u, e.v, 1.0);
    t.emplace_back(e.v, e.u, 1.0);
  }
  Eigen::SparseMatrix<double> a(n_, n_);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

double Graph::mean_degree() const {
  return n_ == 0 ? 0.0 : 2.0 * static_cast<double>(edges_.size()) / n_;
}

DirectedEdgeIndex directed_edge_index(const Graph& g) {
  const Index m = g.num_edges();
  const int n = g.num_nodes();
  DirectedEdgeIndex idx;
  idx.count = 2 * m;
  idx.tail.resize(2 * m);
  idx.head.resize(2 * m);
  idx.inv.resize(2 * m);
  for (Index k = 0; k < m; ++k) {
    const auto& e = g.edges()[k];
    idx.tail[k] = e.u;
    idx.head[k] = e.v;
    idx.tail[m + k] = e.v;
    idx.head[m + k] = e.u;
    idx.inv[k] = m + k;
    idx.inv[m + k] = k;
  }
  idx.out_offsets.resize(static_cast<std::size_t>(n) + 1);
  idx.out_offsets[0] = 0;
  idx.out_edges.resize(2 * m);
  idx.in_edges.resize(2 * m);
  for (int i = 0; i < n; ++i) {
    idx.out_offsets[i + 1] = idx.out_offsets[i] + g.degree(i);
    auto nb = g.neighbors(i);
    auto ids = g.incident_edges(i);
    for (std::size_t p = 0; p < nb.size(); ++p) {
      const Index k = ids[p];
      const Index out = i < nb[p] ? k : m + k;
      idx.out_edges[idx.out_offsets[i] + p] = out;
      idx.in_edges[idx.out_offsets[i] + p] = idx.inv[out];
    }
  }
  return idx;
}

Eigen::SparseMatrix<int> line_graph_adjacency(const Graph& g) {
  std::vector<Eigen::Triplet<int>> t;
  for (int i = 0; i < g.num_nodes(); ++i) {
    auto ids = g.incident_edges(i);
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = 0; b < ids.size(); ++b)
        if (a != b) t.emplace_back(ids[a], ids[b], 1);
  }
  const Index m = g.num_edges();
  Eigen::SparseMatrix<int> l(m, m);
  // Simple graphs share at most one node per edge pair, so no duplicates sum.
  l.setFromTriplets(t.begin(), t.end());
  return l;
}

InOut in_out_project(const DirectedEdgeIndex& index, int num_nodes,
                     const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != index.count)
    throw ValidationError("edge vector has length " + std::to_string(x.size()) +
                          ", expected " + std::to_string(index.count));
  InOut r{Eigen::VectorXd::Zero(num_nodes), Eigen::VectorXd::Zero(num_nodes)};
  for (Index e = 0; e < index.count; ++e) {
    r.out(index.tail[e]) += x(e);
    r.in(index.head[e]) += x(e);
  }
  return r;
}

InOut in_out_project(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return in_out_project(directed_edge_index(g), g.num_nodes(), x);
}

Eigen::SparseMatrix<double> end_matrix(const DirectedEdgeIndex& index, int num_nodes) {
  Eigen::SparseMatrix<double> e(index.count, num_nodes);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(index.count);
  for (Index k = 0; k < index.count; ++k) t.emplace_back(k, index.head[k], 1.0);
  e.setFromTriplets(t.begin(), t.end());
  return e;
}

Eigen::SparseMatrix<double> start_matrix(const DirectedEdgeIndex& index, int num_nodes) {
  Eigen::SparseMatrix<double> s(index.count, num_nodes);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(index.count);
  for (Index k = 0; k < index.count; ++k) t.emplace_back(k, index.tail[k], 1.0);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

double adjacency_top_eigenvalue(const Graph& g, double tol, int max_iter) {
  if (!(tol > 0)) throw ValidationError("tolerance must be positive");
  const int n = g.num_nodes();
  if (n == 0) throw ValidationError("empty graph has no adjacency eigenvalue");
  const Eigen::SparseMatrix<double> a = g.adjacency();
  // The +I shift makes the Perron root strictly dominant on bipartite graphs.
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
  double residual = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd ax = a * x;
    const double lambda = x.dot(ax);
    residual = (ax - lambda * x).norm();
    if (residual <= tol) return lambda;
    Eigen::VectorXd y = ax + x;
    x = y / y.norm();
  }
  throw NumericalError("power iteration did not converge in " + std::to_string(max_iter) +
                       " iterations (residual " + std::to_string(residual) + ")");
}

std::vector<std::vector<int>> connected_components(const Graph& g) {
  const int n = g.num_nodes();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> out;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    comp[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      out[id].push_back(v);
      for (int w : g.neighbors(v))
        if (comp[w] < 0) {
          comp[w] = id;
          stack.push_back(w);
        }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

std::vector<int> two_core(const Graph& g) {
  const int n = g.num_nodes();
  std::vector<int> deg = g.degrees();
  std::vector<char> removed(static_cast<std::size_t>(n), 0);
  std::vector<int> queue;
  for (int i = 0; i < n; ++i)
    if (deg[i] <= 1) {
      removed[i] = 1;
      queue.push_back(i);
    }
  while (!queue.empty()) {
    const int v = queue.back();
    queue.pop_back();
    for (int w : g.neighbors(v)) {
      if (removed[w]) continue;
      if (--deg[w] <= 1) {
        removed[w] = 1;
        queue.push_back(w);
      }
    }
  }
  std::vector<int> core;
  for (int i = 0; i < n; ++i)
    if (!removed[i]) core.push_back(i);
  return core;
}

Graph induced_subgraph(const Graph& g, std::span<const int> nodes) {
  std::vector<int> relabel(static_cast<std::size_t>(g.num_nodes()), -1);
  for (std::size_t p = 0; p < nodes.size(); ++p) relabel[nodes[p]] = static_cast<int>(p);
  std::vector<std::pair<int, int>> kept;
  for (const auto& e : g.edges())
    if (relabel[e.u] >= 0 && relabel[e.v] >= 0) kept.emplace_back(relabel[e.u], relabel[e.v]);
  return build_graph(static_cast<int>(nodes.size()), kept);
}

}  // namespace nbsc
