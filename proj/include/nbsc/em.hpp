#pragma once

#include "nbsc/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace nbsc {

/// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] inside logs.
inline constexpr double kProbClamp = 1e-9;

struct EmState {
  Eigen::VectorXd r;     ///< cluster proportions
  Eigen::MatrixXd P;     ///< symmetric connection probabilities
  Eigen::MatrixXd resp;  ///< n x k responsibilities
  double loglik = 0.0;   ///< EM lower bound, see em_objective
};

struct LogLikelihood {
  double value = 0.0;
  bool clamped = false;  ///< some probability with a positive count hit the clamp
};

/// Half the log of the block-model likelihood over ordered pairs i != j,
/// with responsibilities in place of 0-1 memberships.
LogLikelihood log_likelihood(const Graph& g, const Eigen::Ref<const Eigen::MatrixXd>& resp,
                             const Eigen::Ref<const Eigen::MatrixXd>& P);
LogLikelihood log_likelihood(const Graph& g, std::span<const int> labels, int k,
                             const Eigen::Ref<const Eigen::MatrixXd>& P);

/// log_likelihood + sum q_ia log r_a - sum q_ia log q_ia. Neither the E-step
/// sweep nor the M-step can decrease it.
double em_objective(const Graph& g, const Eigen::Ref<const Eigen::MatrixXd>& resp,
                    const Eigen::Ref<const Eigen::VectorXd>& r, const Eigen::Ref<const Eigen::MatrixXd>& P);

/// Responsibilities r_ai proportional to
///   r_a prod_b p_ab^{sum_{j~i} q_jb} (1 - p_ab)^{sum_{j!~i, j!=i} q_jb},
/// updated node by node in index order, each node seeing its predecessors'
/// new rows. Entries below machine epsilon times the row maximum are set to
/// zero. `hard` replaces each row by its argmax indicator.
Eigen::MatrixXd e_step(const Graph& g, const EmState& state, bool hard = false);

struct MStep {
  Eigen::VectorXd r;
  Eigen::MatrixXd P;
  std::vector<char> degenerate;  ///< per cluster: some p_ab had a zero denominator
};

/// p_ab = sum_{i!=j} q_ai q_bj a_ij / sum_{i!=j} q_ai q_bj, r_a = mean_i q_ai.
/// Entries with zero denominator keep `previous` (or 0 without one).
MStep m_step(const Graph& g, const Eigen::Ref<const Eigen::MatrixXd>& resp,
             const Eigen::MatrixXd* previous = nullptr);

struct EmOptions {
  double tol = 1e-6;
  int max_iter = 500;
  bool hard = false;
};

struct EmResult {
  EmState state;
  std::vector<int> labels;
  std::vector<double> trace;  ///< objective after the initial M-step and each iteration
  int iters = 0;
  bool converged = false;
};

EmResult em_run(const Graph& g, int k, std::span<const int> init_labels, const EmOptions& opts = {});
/// Random multinomial initial labels drawn with `seed`.
EmResult em_run_random(const Graph& g, int k, std::uint64_t seed, const EmOptions& opts = {});

}  // namespace nbsc
