#include "nbsc/em.hpp"

#include "nbsc/cluster.hpp"
#include "nbsc/error.hpp"
#include "nbsc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nbsc {

namespace {

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

// Ordered-pair edge counts E_ab = sum_{i != j} a_ij q_ia q_jb and pair
// totals T_ab = sum_{i != j} q_ia q_jb.
struct PairCounts {
  Eigen::MatrixXd edges;
  Eigen::MatrixXd pairs;
};

PairCounts pair_counts(const Graph& g, const Eigen::Ref<const Eigen::MatrixXd>& q) {
  const Index k = q.cols();
  PairCounts pc;
  pc.edges = Eigen::MatrixXd::Zero(k, k);
  for (const auto& e : g.edges()) {
    const Eigen::MatrixXd outer = q.row(e.u).transpose() * q.row(e.v);
    pc.edges += outer + outer.transpose();
  }
  const Eigen::VectorXd totals = q.colwise().sum().transpose();
  pc.pairs = totals * totals.transpose() - q.transpose() * q;
  return pc;
}

void check_shapes(const Graph& g, Index rows, Index k, const Eigen::Ref<const Eigen::MatrixXd>& P) {
  if (rows != g.num_nodes()) throw ValidationError("responsibility matrix must have n rows");
  if (P.rows() != k || P.cols() != k) throw ValidationError("P must be k x k");
}

}  // namespace

LogLikelihood log_likelihood(const Graph& g, const Eigen::Ref<const Eigen::MatrixXd>& resp,
                             const Eigen::Ref<const Eigen::MatrixXd>& P) {
  check_shapes(g, resp.rows(), resp.cols(), P);
  const PairCounts pc = pair_counts(g, resp);
  LogLikelihood ll;
  for (Index a = 0; a < P.rows(); ++a)
    for (Index b = 0; b < P.cols(); ++b) {
      const double e = pc.edges(a, b);
      const double ne = std::max(pc.pairs(a, b) - e, 0.0);
      const double p = clamp_prob(P(a, b));
      if ((e > 0 && P(a, b) < kProbClamp) || (ne > 0 && P(a, b) > 1.0 - kProbClamp)) ll.clamped = true;
      ll.value += 0.5 * (e * std::log(p) + ne * std::log1p(-p));
    }
  return ll;
}

LogLikelihood log_likelihood(const Graph& g, std::span<const int> labels, int k,
                             const Eigen::Ref<const Eigen::MatrixXd>& P) {
  return log_likelihood(g, one_hot(labels, k), P);
}

double em_objective(const Graph& g, const Eigen::Ref<const Eigen::MatrixXd>& resp,
                    const Eigen::Ref<const Eigen::VectorXd>& r, const Eigen::Ref<const Eigen::MatrixXd>& P) {
  double f = log_likelihood(g, resp, P).value;
  for (Index i = 0; i < resp.rows(); ++i)
    for (Index a = 0; a < resp.cols(); ++a) {
      const double q = resp(i, a);
      if (q > 0) f += q * (std::log(r(a)) - std::log(q));
    }
  return f;
}

Eigen::MatrixXd e_step(const Graph& g, const EmState& state, bool hard) {
  const Index k = state.r.size();
  check_shapes(g, state.resp.rows(), k, state.P);
  Eigen::MatrixXd q = state.resp;
  Eigen::MatrixXd logp(k, k), lognp(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) {
      const double p = clamp_prob(state.P(a, b));
      logp(a, b) = std::log(p);
      lognp(a, b) = std::log1p(-p);
    }
  Eigen::VectorXd logr(k);
  for (Index a = 0; a < k; ++a)
    logr(a) = state.r(a) > 0 ? std::log(state.r(a)) : -std::numeric_limits<double>::infinity();

  Eigen::RowVectorXd totals = q.colwise().sum();
  Eigen::RowVectorXd nbr(k), non(k), logw(k);
  for (int i = 0; i < g.num_nodes(); ++i) {
    nbr.setZero();
    for (int j : g.neighbors(i)) nbr += q.row(j);
    non = totals - q.row(i) - nbr;
    logw = (logr + logp * nbr.transpose() + lognp * non.transpose()).transpose();
    Index best = 0;
    const double top = logw.maxCoeff(&best);
    Eigen::RowVectorXd row(k);
    if (hard) {
      row = Eigen::RowVectorXd::Unit(k, best);
    } else {
      // Weights below machine epsilon relative to the top one cannot move
      // the row sum; they are set to zero so separable blocks come out exact.
      row = (logw.array() - top).exp().matrix();
      row = (row.array() < std::numeric_limits<double>::epsilon()).select(0.0, row);
      row /= row.sum();
    }
    totals += row - q.row(i);
    q.row(i) = row;
  }
  return q;
}

MStep m_step(const Graph& g, const Eigen::Ref<const Eigen::MatrixXd>& resp, const Eigen::MatrixXd* previous) {
  const Index k = resp.cols();
  if (resp.rows() != g.num_nodes()) throw ValidationError("responsibility matrix must have n rows");
  const PairCounts pc = pair_counts(g, resp);
  MStep out;
  out.r = resp.colwise().mean().transpose();
  out.P = Eigen::MatrixXd::Zero(k, k);
  out.degenerate.assign(static_cast<std::size_t>(k), 0);
  for (Index a = 0; a < k; ++a)
    for (Index b = a; b < k; ++b) {
      const double denom = 0.5 * (pc.pairs(a, b) + pc.pairs(b, a));
      double p;
      if (denom > 1e-12) {
        p = std::clamp(0.5 * (pc.edges(a, b) + pc.edges(b, a)) / denom, 0.0, 1.0);
      } else {
        p = previous ? (*previous)(a, b) : 0.0;
        out.degenerate[a] = out.degenerate[b] = 1;
      }
      out.P(a, b) = out.P(b, a) = p;
    }
  return out;
}

EmResult em_run(const Graph& g, int k, std::span<const int> init_labels, const EmOptions& opts) {
  if (k < 1) throw ValidationError("cluster count must be at least 1");
  if (static_cast<int>(init_labels.size()) != g.num_nodes())
    throw ValidationError("initial labels must cover every node");
  EmResult res;
  EmState& s = res.state;
  s.resp = one_hot(init_labels, k);
  MStep ms = m_step(g, s.resp);
  s.r = ms.r;
  s.P = ms.P;
  s.loglik = em_objective(g, s.resp, s.r, s.P);
  res.trace.push_back(s.loglik);

  for (int it = 1; it <= opts.max_iter; ++it) {
    s.resp = e_step(g, s, opts.hard);
    ms = m_step(g, s.resp, &s.P);
    s.r = ms.r;
    s.P = ms.P;
    const double next = em_objective(g, s.resp, s.r, s.P);
    const double gain = next - s.loglik;
    s.loglik = next;
    res.trace.push_back(next);
    res.iters = it;
    if (gain < opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.labels = argmax_labels(s.resp);
  return res;
}

EmResult em_run_random(const Graph& g, int k, std::uint64_t seed, const EmOptions& opts) {
  if (k < 1) throw ValidationError("cluster count must be at least 1");
  Rng rng(seed);
  std::vector<int> labels(static_cast<std::size_t>(g.num_nodes()));
  for (int& l : labels) l = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return em_run(g, k, labels, opts);
}

}  // namespace nbsc
