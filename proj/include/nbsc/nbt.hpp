#pragma once

#include "nbsc/graph.hpp"
#include "nbsc/sbm.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>

namespace nbsc {

/// Non-backtracking matrix over the half-edges of DirectedEdgeIndex:
/// B(e, f) = 1 iff head(f) = tail(e) and tail(f) != head(e), i.e. the walk
/// f then e does not reverse. Row e holds deg(tail(e)) - 1 ones.
using NbtMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Ihara companion [[0, D - I], [-I, A]] of order 2n.
using KMatrix = Eigen::MatrixXd;

NbtMatrix build_B(const Graph& g);
KMatrix build_K(const Graph& g);

/// Swaps the half-edge blocks [0, m) and [m, 2m).
Eigen::PermutationMatrix<Eigen::Dynamic> reversal_permutation(Index m);

enum class SpectrumRoute {
  dense,        ///< direct eigensolve of the given matrix
  ihara,        ///< spec(K) plus +-1 with multiplicity m - n
  direct_core,  ///< m < n: pendant-tree zeros plus a direct solve on the 2-core
};

/// Complex eigenvalue multiset ordered by descending real part, then
/// descending imaginary part (so the conjugate with Im > 0 comes first).
struct Spectrum {
  Eigen::VectorXcd values;
  SpectrumRoute route = SpectrumRoute::dense;

  Index size() const { return values.size(); }
  static Spectrum sorted(Eigen::VectorXcd values, SpectrumRoute route = SpectrumRoute::dense);
};

struct SpectrumOptions {
  /// Imaginary parts below tol * ||M||_F are snapped to zero (pairwise).
  double tol = 1e-14;
  Index max_dim = 4096;
};

/// All eigenvalues of a real square matrix (LAPACK dgeev, no vectors).
Spectrum spectrum_dense(const Eigen::Ref<const Eigen::MatrixXd>& m, const SpectrumOptions& opts = {});

/// spec(B) from the 2-core (pendant trees only add zeros): spec(K) of the
/// core plus +-1 with multiplicity m_core - n_core when m >= n, a direct
/// solve of the core's B otherwise. The route flag records which was used.
Spectrum spectrum_B_via_ihara(const Graph& g, const SpectrumOptions& opts = {});

/// Direct dense eigensolve of the full 2m x 2m B.
Spectrum spectrum_B_direct(const Graph& g, const SpectrumOptions& opts = {});

struct StructuralOptions {
  double imag_tol = 1e-6;  ///< relative: |Im| <= imag_tol * max(1, |Re|)
  double margin = 0.02;    ///< Re > max(sqrt(c), 1) * (1 + margin)
};

bool is_structural(std::complex<double> z, double c, const StructuralOptions& opts = {});

/// Real eigenvalues escaping the bulk, descending; their count is k0.
Eigen::VectorXd structural_eigenvalues(const Spectrum& s, double c, const StructuralOptions& opts = {});

/// Largest modulus among the eigenvalues that are not structural.
double bulk_radius(const Spectrum& s, double c, const StructuralOptions& opts = {});

/// Large-n limit of spec(B) for a model: the outliers nu_i above sqrt(c)
/// plus `bulk_points` eigenvalues spread on the circle of radius sqrt(c).
Spectrum asymptotic_spectrum(const SbmParams& p, int bulk_points = 64);

/// Right eigenvector (x_out; x_in) of K for a real eigenvalue near `target`,
/// unit norm, with x_out = (D - I) x_in / mu.
struct KEigenpair {
  double mu = 0.0;
  Eigen::VectorXd x_out;
  Eigen::VectorXd x_in;
  double residual = 0.0;
};
KEigenpair k_right_eigenpair(const KMatrix& k, double target);

/// Invariant subspace for `multiplicity` real eigenvalues clustered around
/// `target` (columns orthonormal in x_in).
struct KEigenspace {
  double mu = 0.0;
  Eigen::MatrixXd x_out;
  Eigen::MatrixXd x_in;
  double residual = 0.0;
  bool degenerate = false;
};
KEigenspace k_right_eigenspace(const KMatrix& k, double target, int multiplicity, double spread = 0.0);

}  // namespace nbsc
