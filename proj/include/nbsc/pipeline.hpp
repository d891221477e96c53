#pragma once

#include "nbsc/cluster.hpp"
#include "nbsc/em.hpp"
#include "nbsc/graph.hpp"
#include "nbsc/nbt.hpp"
#include "nbsc/sbm.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nbsc {

struct SweepRecord {
  std::uint64_t seed = 0;
  double beta = 0.0;
  Index m = 0;
  double c_emp = 0.0;
  Eigen::VectorXd structural;
  int k0 = 0;
  double bulk_radius = 0.0;
  SpectrumRoute route = SpectrumRoute::ihara;
};

struct SweepOptions {
  std::vector<double> grid;            ///< empty: default_beta_grid()
  std::vector<std::uint64_t> seeds{1, 2, 3};
  StructuralOptions structural{};
  unsigned threads = 0;                ///< 0: hardware concurrency
};

/// 0.05, 0.10, ..., 1.00.
std::vector<double> default_beta_grid();

/// Per seed s the beta = 1 graph comes from sample_graph(params, n,
/// mix_seed(s, 0)) and every grid point percolates it with the stream
/// mix_seed(s, 1), so kept edges are nested in beta. The structural cutoff
/// at each point uses that graph's own 2m/n. Records come seed-major, grid
/// order within a seed.
std::vector<SweepRecord> beta_sweep(const SbmParams& params, int n, const SweepOptions& opts = {});

struct Transitions {
  std::vector<double> first_seen;  ///< entry i-1: smallest beta with k0 >= i
  std::vector<int> cleaned_k0;     ///< running maximum of k0
  std::vector<double> dips;        ///< betas where k0 fell below the running maximum
};

/// Records of one seed; sorted by beta here.
Transitions detect_transitions(const std::vector<SweepRecord>& records);

struct PipelineOptions {
  StructuralOptions structural{};
  KMeansOptions kmeans{};
  EmOptions em{};
  bool refine = true;  ///< run EM from the k-means labels
};

struct PipelineReport {
  int n = 0;
  Index m = 0;
  double c_emp = 0.0;
  SpectrumRoute route = SpectrumRoute::ihara;
  int k0 = 0;
  Eigen::VectorXd structural;
  double bulk_radius = 0.0;
  std::vector<double> predicted_thresholds;  ///< c_emp / mu_i^2, ascending
  double largest_component = 0.0;            ///< fraction of nodes
  ClusterAssignment clustering;              ///< k-means on the embedding
  bool embedding_degenerate = false;
  std::optional<EmResult> em;
  std::vector<int> labels;  ///< EM labels when refined, else k-means labels
  std::string diagnosis;    ///< empty, or why no clustering was produced
};

PipelineReport pipeline(const Graph& g, const PipelineOptions& opts = {});

}  // namespace nbsc
