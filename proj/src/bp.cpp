#include "nbsc/bp.hpp"

#include "nbsc/error.hpp"
#include "nbsc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace nbsc {

Messages init_messages(const Graph& g, int k, MessageInit mode, std::uint64_t seed) {
  if (k < 1) throw ValidationError("cluster count must be at least 1");
  const Index rows = 2 * g.num_edges();
  if (mode == MessageInit::uniform) return Messages::Constant(rows, k, 1.0 / k);
  Rng rng(seed);
  Messages m(rows, k);
  for (Index e = 0; e < rows; ++e) {
    for (int a = 0; a < k; ++a) m(e, a) = rng.exponential();
    m.row(e) /= m.row(e).sum();
  }
  return m;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-node accumulation of log prod_f s_f^a over incoming half-edges f,
// with exact zeros counted separately so cavities can remove them.
struct NodeField {
  Eigen::MatrixXd factor;  // 2m x k, row f = P psi_f
  Eigen::MatrixXd logsum;  // n x k
  Eigen::MatrixXi zeros;   // n x k
};

NodeField accumulate(const Graph& g, const DirectedEdgeIndex& idx, const Messages& msgs,
                     const Eigen::MatrixXd& prob) {
  const int n = g.num_nodes();
  const Index k = prob.rows();
  NodeField f;
  f.factor = msgs * prob;  // prob is symmetric
  f.logsum = Eigen::MatrixXd::Zero(n, k);
  f.zeros = Eigen::MatrixXi::Zero(n, k);
  for (Index e = 0; e < idx.count; ++e) {
    const int u = idx.head[e];
    for (Index a = 0; a < k; ++a) {
      const double s = f.factor(e, a);
      if (s > 0)
        f.logsum(u, a) += std::log(s);
      else
        ++f.zeros(u, a);
    }
  }
  return f;
}

// Normalizes exp(logw) in place; returns false if every entry is -inf.
bool normalize_log(Eigen::Ref<Eigen::RowVectorXd> logw) {
  const double top = logw.maxCoeff();
  if (top == kNegInf) return false;
  for (Index a = 0; a < logw.size(); ++a) logw(a) = std::exp(logw(a) - top);
  logw /= logw.sum();
  return true;
}

Eigen::MatrixXd edge_probabilities(const SbmParams& params, int n) {
  return params.beta * params.C / std::max(n, 1);
}

// Non-edge field h_a = sum_b p_ab sum_k psi_k^b, with psi_k taken as the mean
// of k's outgoing messages (r for isolated nodes). Zero when disabled.
Eigen::RowVectorXd non_edge_field(const Graph& g, const DirectedEdgeIndex& idx, const Messages& msgs,
                                  const SbmParams& params, bool enabled) {
  const int k = params.k;
  if (!enabled) return Eigen::RowVectorXd::Zero(k);
  Eigen::RowVectorXd mass = Eigen::RowVectorXd::Zero(k);
  for (int v = 0; v < g.num_nodes(); ++v) {
    const auto out = idx.outgoing(v);
    if (out.empty()) {
      mass += params.r.transpose();
      continue;
    }
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(k);
    for (auto e : out) mean += msgs.row(e);
    mass += mean / static_cast<double>(out.size());
  }
  return mass * edge_probabilities(params, g.num_nodes());
}

}  // namespace

BpStep bp_step(const Graph& g, const DirectedEdgeIndex& idx, const Messages& msgs,
               const SbmParams& params, double damping, bool with_field) {
  if (!(damping >= 0.0 && damping < 1.0)) throw ValidationError("damping must lie in [0, 1)");
  const int k = params.k;
  if (msgs.rows() != idx.count || msgs.cols() != k)
    throw ValidationError("message matrix has the wrong shape");
  const NodeField field = accumulate(g, idx, msgs, edge_probabilities(params, g.num_nodes()));
  const Eigen::RowVectorXd h = non_edge_field(g, idx, msgs, params, with_field);
  const Eigen::ArrayXd logr = params.r.array().log() - h.transpose().array();

  BpStep out;
  out.messages.resize(idx.count, k);
  Eigen::RowVectorXd logw(k);
  for (Index e = 0; e < idx.count; ++e) {
    const int u = idx.tail[e];
    const Index back = idx.inv[e];  // v->u, the excluded neighbor
    for (int a = 0; a < k; ++a) {
      const double s = field.factor(back, a);
      const int zeros = field.zeros(u, a) - (s > 0 ? 0 : 1);
      logw(a) = zeros > 0 ? kNegInf : logr(a) + field.logsum(u, a) - (s > 0 ? std::log(s) : 0.0);
    }
    if (!normalize_log(logw))
      throw NumericalError("message on half-edge " + std::to_string(e) + " (" +
                           std::to_string(u) + "->" + std::to_string(idx.head[e]) +
                           ") has no admissible cluster");
    out.messages.row(e) = (1.0 - damping) * logw + damping * msgs.row(e);
  }
  out.max_delta = idx.count == 0 ? 0.0 : (out.messages - msgs).cwiseAbs().maxCoeff();
  return out;
}

BpStep bp_step(const Graph& g, const Messages& msgs, const SbmParams& params, double damping, bool field) {
  return bp_step(g, directed_edge_index(g), msgs, params, damping, field);
}

Marginals bp_marginals(const Graph& g, const DirectedEdgeIndex& idx, const Messages& msgs,
                       const SbmParams& params, bool with_field) {
  const int n = g.num_nodes();
  const int k = params.k;
  const NodeField field = accumulate(g, idx, msgs, edge_probabilities(params, n));
  const Eigen::RowVectorXd h = non_edge_field(g, idx, msgs, params, with_field);
  Marginals out(n, k);
  Eigen::RowVectorXd logw(k);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < k; ++a)
      logw(a) = field.zeros(i, a) > 0 ? kNegInf : std::log(params.r(a)) - h(a) + field.logsum(i, a);
    if (!normalize_log(logw)) logw = params.r.transpose();
    out.row(i) = logw;
  }
  return out;
}

BpResult bp_run(const Graph& g, const SbmParams& params, const BpOptions& opts) {
  params.validate();
  if (!(opts.tol > 0)) throw ValidationError("tolerance must be positive");
  const DirectedEdgeIndex idx = directed_edge_index(g);
  BpResult res;
  res.messages = init_messages(g, params.k, opts.init, opts.seed);
  for (int it = 1; it <= opts.max_iter; ++it) {
    BpStep step = bp_step(g, idx, res.messages, params, opts.damping, opts.field);
    res.messages = std::move(step.messages);
    res.iters = it;
    if (step.max_delta < opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.marginals = bp_marginals(g, idx, res.messages, params, opts.field);
  return res;
}

Stability linear_stability(const SbmParams& params, const Spectrum& bspec, const StabilityOptions& opts) {
  const Eigen::VectorXd tau = transmission_eigenvalues(params);
  const double c = opts.c > 0 ? opts.c : average_degree(params, true);
  const double cutoff = std::max(std::sqrt(c), 1.0) * (1.0 + opts.structural.margin);

  // Real outliers of either sign, largest real part first; the first is Perron.
  std::vector<double> outliers;
  for (Index i = 0; i < bspec.size(); ++i) {
    const auto z = bspec.values(i);
    if (std::abs(z.imag()) <= opts.structural.imag_tol * std::max(1.0, std::abs(z.real())) &&
        std::abs(z.real()) > cutoff)
      outliers.push_back(z.real());
  }
  std::sort(outliers.begin(), outliers.end(), std::greater<>());

  Stability s;
  for (std::size_t i = 1; i < outliers.size(); ++i)
    for (Index j = 1; j < tau.size(); ++j)
      s.max_product = std::max(s.max_product, std::abs(outliers[i] * tau(j)));
  s.unstable = s.max_product > 1.0;

  // bspec is ordered by descending real part, so index 0 is mu_1.
  for (Index i = 0; i < bspec.size(); ++i)
    for (Index j = 0; j < tau.size(); ++j) {
      if (i == 0 && j == 0) continue;
      s.raw_max_product = std::max(s.raw_max_product, std::abs(bspec.values(i)) * std::abs(tau(j)));
    }
  s.raw_unstable = s.raw_max_product > 1.0;
  return s;
}

}  // namespace nbsc
