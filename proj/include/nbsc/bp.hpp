#pragma once

#include "nbsc/graph.hpp"
#include "nbsc/nbt.hpp"
#include "nbsc/sbm.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace nbsc {

/// 2m x k. Row e (half-edge u->v) is the message psi_{v<-u}: the belief about
/// u's cluster with v removed. It is computed from the rows of the half-edges
/// w->u, w != v, i.e. exactly the nonzeros of row e of B.
using Messages = Eigen::MatrixXd;
/// n x k node-membership probabilities.
using Marginals = Eigen::MatrixXd;

enum class MessageInit { uniform, random };

/// Uniform rows (1/k, ..., 1/k) or i.i.d. Dirichlet(1, ..., 1) rows.
Messages init_messages(const Graph& g, int k, MessageInit mode, std::uint64_t seed = 0);

struct BpStep {
  Messages messages;
  double max_delta = 0.0;
};

/// One synchronous update of every message from params (r, p_ab = beta c_ab / n),
/// rows renormalized, then damped: new = (1 - damping) update + damping old.
/// Throws NumericalError naming the half-edge if an update row is all zero.
///
/// With `field`, every update also carries exp(-h_a), h_a = sum_b p_ab
/// sum_k psi_k^b: the non-edges' share of the likelihood. Without it the
/// all-in-one-cluster state attracts the iteration whenever c > 1. It is
/// constant over a in symmetric models, so the uniform point is unaffected.
BpStep bp_step(const Graph& g, const DirectedEdgeIndex& index, const Messages& msgs,
               const SbmParams& params, double damping = 0.1, bool field = true);
BpStep bp_step(const Graph& g, const Messages& msgs, const SbmParams& params, double damping = 0.1,
               bool field = true);

/// psi_i^a proportional to r_a prod_{j~i} sum_b psi_{i<-j}^b p_ab (times
/// exp(-h_a) with the field); isolated nodes get r.
Marginals bp_marginals(const Graph& g, const DirectedEdgeIndex& index, const Messages& msgs,
                       const SbmParams& params, bool field = true);

struct BpOptions {
  double tol = 1e-8;
  int max_iter = 1000;
  double damping = 0.1;
  MessageInit init = MessageInit::random;
  std::uint64_t seed = 0;
  bool field = true;  ///< non-edge field, see bp_step
};

struct BpResult {
  Messages messages;
  Marginals marginals;
  bool converged = false;
  int iters = 0;
};

BpResult bp_run(const Graph& g, const SbmParams& params, const BpOptions& opts = {});

struct Stability {
  /// Community criterion: some product of a non-Perron outlier of B and a
  /// non-trivial eigenvalue of T exceeds 1 in modulus.
  bool unstable = false;
  double max_product = 0.0;
  /// Raw criterion: any |mu * tau| > 1 over all of spec(B) x spec(T) except
  /// the trivial pair (mu_1, tau_1 = 1).
  bool raw_unstable = false;
  double raw_max_product = 0.0;
};

struct StabilityOptions {
  /// Bulk scale for the outlier cutoff; <= 0 means the model's average degree.
  double c = -1.0;
  StructuralOptions structural{};
};

Stability linear_stability(const SbmParams& params, const Spectrum& bspec, const StabilityOptions& opts = {});

}  // namespace nbsc
