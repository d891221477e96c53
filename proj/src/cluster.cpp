#include "nbsc/cluster.hpp"

#include "nbsc/error.hpp"
#include "nbsc/nbt.hpp"
#include "nbsc/rng.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace nbsc {

Embedding node_embedding(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& structural,
                         const EmbeddingOptions& opts) {
  Embedding emb;
  for (int i = 0; i < g.num_nodes(); ++i)
    if (g.degree(i) > 0) emb.nodes.push_back(i);
  const auto rows = static_cast<Index>(emb.nodes.size());
  const Index k0 = structural.size();
  emb.points.resize(rows, k0);
  emb.eigenvalues = structural;
  if (k0 == 0) return emb;

  const KMatrix kmat = build_K(g);
  Index col = 0;
  while (col < k0) {
    // Group eigenvalues closer than the gap into one invariant subspace.
    Index end = col + 1;
    while (end < k0 && structural(end - 1) - structural(end) < opts.degeneracy_gap) ++end;
    const int mult = static_cast<int>(end - col);
    const double mean = structural.segment(col, mult).mean();
    const double spread = structural(col) - structural(end - 1);
    const KEigenspace space = k_right_eigenspace(kmat, mean, mult, spread);
    emb.degenerate = emb.degenerate || space.degenerate;
    for (int j = 0; j < mult; ++j)
      for (Index p = 0; p < rows; ++p) {
        const int node = emb.nodes[p];
        emb.points(p, col + j) = space.x_in(node, j) / g.degree(node);
      }
    col = end;
  }
  if (opts.normalize_columns)
    for (Index j = 0; j < k0; ++j) {
      const double nrm = emb.points.col(j).norm();
      if (nrm > 0) emb.points.col(j) /= nrm;
    }
  return emb;
}

namespace {

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
};

Eigen::MatrixXd plus_plus_seeds(const Eigen::Ref<const Eigen::MatrixXd>& x, int k, Rng& rng) {
  const Index n = x.rows();
  Eigen::MatrixXd centers(k, x.cols());
  centers.row(0) = x.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0) {
      double target = rng.uniform() * total;
      for (pick = 0; pick < n - 1; ++pick) {
        target -= d2(pick);
        if (target < 0) break;
      }
    } else {
      pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

// Assigns each point to its nearest center (lowest index on ties); returns
// the objective and writes per-point squared distances.
double assign(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::MatrixXd& centers,
              std::vector<int>& labels, Eigen::VectorXd& dist) {
  double obj = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    Index best = 0;
    const double d = (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
    labels[i] = static_cast<int>(best);
    dist(i) = d;
    obj += d;
  }
  return obj;
}

Run lloyd(const Eigen::Ref<const Eigen::MatrixXd>& x, int k, int max_iter, Rng& rng) {
  const Index n = x.rows();
  Run run;
  run.centers = plus_plus_seeds(x, k, rng);
  run.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> next(static_cast<std::size_t>(n));
  Eigen::VectorXd dist(n);
  for (int it = 0; it < max_iter; ++it) {
    double obj = assign(x, run.centers, next, dist);
    // Empty cluster: move its center to the farthest point.
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (int l : next) ++counts(l);
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0) continue;
      Index far = 0;
      dist.maxCoeff(&far);
      run.centers.row(c) = x.row(far);
      obj = assign(x, run.centers, next, dist);
      counts.setZero();
      for (int l : next) ++counts(l);
    }
    run.trace.push_back(obj);
    run.objective = obj;
    if (next == run.labels) break;
    run.labels = next;
    run.centers.setZero();
    for (Index i = 0; i < n; ++i) run.centers.row(run.labels[i]) += x.row(i);
    for (int c = 0; c < k; ++c)
      if (counts(c) > 0) run.centers.row(c) /= counts(c);
  }
  // Labels and centers are now mutually consistent (centers are means).
  run.objective = 0.0;
  for (Index i = 0; i < n; ++i) run.objective += (x.row(i) - run.centers.row(run.labels[i])).squaredNorm();
  return run;
}

}  // namespace

ClusterAssignment kmeans(const Eigen::Ref<const Eigen::MatrixXd>& points, int k, const KMeansOptions& opts) {
  if (k < 1 || points.rows() < k) throw ValidationError("k-means needs 1 <= k <= number of points");
  if (opts.restarts < 1) throw ValidationError("k-means needs at least one restart");
  Run best;
  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng(mix_seed(opts.seed, static_cast<std::uint64_t>(r)));
    Run run = lloyd(points, k, std::max(opts.max_iter, 1), rng);
    if (run.objective < best.objective) best = std::move(run);
  }
  return {std::move(best.labels), std::move(best.centers), best.objective, std::move(best.trace)};
}

double agreement(std::span<const int> a, std::span<const int> b, int k) {
  if (a.size() != b.size()) throw ValidationError("label vectors differ in length");
  if (a.empty()) return 1.0;
  Eigen::MatrixXi conf = Eigen::MatrixXi::Zero(k, k);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || a[i] >= k || b[i] < 0 || b[i] >= k)
      throw ValidationError("label outside [0, k)");
    ++conf(a[i], b[i]);
  }
  long best = 0;
  if (k <= 8) {
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      long hit = 0;
      for (int c = 0; c < k; ++c) hit += conf(perm[c], c);
      best = std::max(best, hit);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    // Greedy: take the largest remaining confusion entry, retire its row and column.
    std::vector<char> row_used(k, 0), col_used(k, 0);
    for (int step = 0; step < k; ++step) {
      int br = -1, bc = -1, bv = -1;
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c)
          if (!row_used[r] && !col_used[c] && conf(r, c) > bv) {
            bv = conf(r, c);
            br = r;
            bc = c;
          }
      row_used[br] = col_used[bc] = 1;
      best += bv;
    }
  }
  return static_cast<double>(best) / static_cast<double>(a.size());
}

std::vector<int> argmax_labels(const Eigen::Ref<const Eigen::MatrixXd>& probs) {
  std::vector<int> out(static_cast<std::size_t>(probs.rows()));
  for (Index i = 0; i < probs.rows(); ++i) {
    Index best = 0;
    probs.row(i).maxCoeff(&best);
    out[i] = static_cast<int>(best);
  }
  return out;
}

Eigen::MatrixXd one_hot(std::span<const int> labels, int k) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Index>(labels.size()), k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) throw ValidationError("label outside [0, k)");
    q(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return q;
}

ClusterAssignment spectral_clustering(const Graph& g, const Eigen::Ref<const Eigen::VectorXd>& structural,
                                      int k, const KMeansOptions& opts, Embedding* embedding) {
  Embedding emb = node_embedding(g, structural);
  ClusterAssignment inner = kmeans(emb.points, k, opts);
  ClusterAssignment out;
  out.centers = inner.centers;
  out.objective = inner.objective;
  out.trace = inner.trace;

  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (int l : inner.labels) ++sizes[l];
  const int largest = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  out.labels.assign(static_cast<std::size_t>(g.num_nodes()), largest);
  for (std::size_t p = 0; p < emb.nodes.size(); ++p) out.labels[emb.nodes[p]] = inner.labels[p];
  if (embedding) *embedding = std::move(emb);
  return out;
}

}  // namespace nbsc
