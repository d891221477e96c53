#include "nbsc/nbt.hpp"

#include "nbsc/error.hpp"

#include <Eigen/QR>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

extern "C" void dgeev_(const char* jobvl, const char* jobvr, const int* n, double* a, const int* lda,
                       double* wr, double* wi, double* vl, const int* ldvl, double* vr,
                       const int* ldvr, double* work, const int* lwork, int* info);

namespace nbsc {

NbtMatrix build_B(const Graph& g) {
  const DirectedEdgeIndex idx = directed_edge_index(g);
  std::vector<Eigen::Triplet<double>> t;
  for (Index e = 0; e < idx.count; ++e) {
    const int j = idx.tail[e];
    for (Index f : idx.incoming(j))
      if (idx.tail[f] != idx.head[e]) t.emplace_back(e, f, 1.0);
  }
  NbtMatrix b(idx.count, idx.count);
  b.setFromTriplets(t.begin(), t.end());
  return b;
}

KMatrix build_K(const Graph& g) {
  const int n = g.num_nodes();
  KMatrix k = KMatrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    k(i, n + i) = g.degree(i) - 1.0;
    k(n + i, i) = -1.0;
  }
  for (const auto& e : g.edges()) {
    k(n + e.u, n + e.v) = 1.0;
    k(n + e.v, n + e.u) = 1.0;
  }
  return k;
}

Eigen::PermutationMatrix<Eigen::Dynamic> reversal_permutation(Index m) {
  Eigen::VectorXi perm(2 * m);
  for (Index e = 0; e < m; ++e) {
    perm(e) = static_cast<int>(m + e);
    perm(m + e) = static_cast<int>(e);
  }
  return Eigen::PermutationMatrix<Eigen::Dynamic>(perm);
}

Spectrum Spectrum::sorted(Eigen::VectorXcd values, SpectrumRoute route) {
  std::vector<std::complex<double>> v(values.data(), values.data() + values.size());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  Spectrum s;
  s.values = Eigen::Map<Eigen::VectorXcd>(v.data(), static_cast<Index>(v.size()));
  s.route = route;
  return s;
}

Spectrum spectrum_dense(const Eigen::Ref<const Eigen::MatrixXd>& m, const SpectrumOptions& opts) {
  if (m.rows() != m.cols()) throw ValidationError("spectrum of a non-square matrix");
  if (m.rows() > opts.max_dim)
    throw ValidationError("matrix order " + std::to_string(m.rows()) + " exceeds the cap " +
                          std::to_string(opts.max_dim));
  if (!m.allFinite()) throw ValidationError("matrix has non-finite entries");
  const int n = static_cast<int>(m.rows());
  if (n == 0) return {};

  Eigen::MatrixXd a = m;
  Eigen::VectorXd wr(n), wi(n);
  double dummy = 0.0;
  const int one = 1;
  int lwork = -1, info = 0;
  double query = 0.0;
  dgeev_("N", "N", &n, a.data(), &n, wr.data(), wi.data(), &dummy, &one, &dummy, &one, &query,
         &lwork, &info);
  lwork = std::max(static_cast<int>(query), 4 * n);
  std::vector<double> work(static_cast<std::size_t>(lwork));
  dgeev_("N", "N", &n, a.data(), &n, wr.data(), wi.data(), &dummy, &one, &dummy, &one,
         work.data(), &lwork, &info);
  if (info > 0)
    throw NumericalError("QR iteration failed to converge; " + std::to_string(info) +
                         " eigenvalues not computed");
  if (info < 0) throw NumericalError("dgeev argument " + std::to_string(-info) + " invalid");

  const double snap = opts.tol * m.norm();
  Eigen::VectorXcd vals(n);
  for (int i = 0; i < n; ++i) {
    // dgeev returns conjugate pairs adjacent with identical real parts.
    const double im = std::abs(wi(i)) <= snap ? 0.0 : wi(i);
    vals(i) = {wr(i), im};
  }
  return Spectrum::sorted(std::move(vals), SpectrumRoute::dense);
}

namespace {

Spectrum pad(const Spectrum& base, Index plus_one, Index minus_one, Index zeros, SpectrumRoute route) {
  Eigen::VectorXcd v(base.size() + plus_one + minus_one + zeros);
  v << base.values, Eigen::VectorXcd::Constant(plus_one, 1.0),
      Eigen::VectorXcd::Constant(minus_one, -1.0), Eigen::VectorXcd::Zero(zeros);
  return Spectrum::sorted(std::move(v), route);
}

}  // namespace

Spectrum spectrum_B_via_ihara(const Graph& g, const SpectrumOptions& opts) {
  const Index m = g.num_edges();
  // Half-edges of pendant trees form a nilpotent block, so they contribute
  // exact zeros and only the 2-core needs an eigensolve. Peeling first also
  // keeps the defective zero eigenvalue out of K.
  const std::vector<int> core_nodes = two_core(g);
  const Graph core = core_nodes.size() == static_cast<std::size_t>(g.num_nodes()) ? g : induced_subgraph(g, core_nodes);
  const Index mc = core.num_edges();
  const Index nc = core.num_nodes();
  const Index tree_zeros = 2 * (m - mc);
  if (m >= g.num_nodes()) {
    Spectrum sk;
    if (nc > 0) sk = spectrum_dense(build_K(core), opts);
    return pad(sk, mc - nc, mc - nc, tree_zeros, SpectrumRoute::ihara);
  }
  Spectrum sc;
  if (mc > 0) sc = spectrum_dense(Eigen::MatrixXd(build_B(core)), opts);
  return pad(sc, 0, 0, tree_zeros, SpectrumRoute::direct_core);
}

Spectrum spectrum_B_direct(const Graph& g, const SpectrumOptions& opts) {
  return spectrum_dense(Eigen::MatrixXd(build_B(g)), opts);
}

bool is_structural(std::complex<double> z, double c, const StructuralOptions& opts) {
  const double cutoff = std::max(std::sqrt(std::max(c, 0.0)), 1.0) * (1.0 + opts.margin);
  return std::abs(z.imag()) <= opts.imag_tol * std::max(1.0, std::abs(z.real())) && z.real() > cutoff;
}

Eigen::VectorXd structural_eigenvalues(const Spectrum& s, double c, const StructuralOptions& opts) {
  std::vector<double> out;
  for (Index i = 0; i < s.size(); ++i)
    if (is_structural(s.values(i), c, opts)) out.push_back(s.values(i).real());
  std::sort(out.begin(), out.end(), std::greater<>());
  return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Index>(out.size()));
}

double bulk_radius(const Spectrum& s, double c, const StructuralOptions& opts) {
  double r = 0.0;
  for (Index i = 0; i < s.size(); ++i)
    if (!is_structural(s.values(i), c, opts)) r = std::max(r, std::abs(s.values(i)));
  return r;
}

Spectrum asymptotic_spectrum(const SbmParams& p, int bulk_points) {
  const double c = average_degree(p, true);
  const double radius = std::sqrt(c);
  const Eigen::VectorXd nu = rc_eigenvalues(p);
  std::vector<std::complex<double>> v;
  for (Index i = 0; i < nu.size(); ++i)
    if (std::abs(nu(i)) > radius) v.emplace_back(nu(i), 0.0);
  for (int j = 0; j < bulk_points; ++j)
    v.push_back(std::polar(radius, std::numbers::pi * (2.0 * j + 1.0) / bulk_points));
  return Spectrum::sorted(Eigen::Map<Eigen::VectorXcd>(v.data(), static_cast<Index>(v.size())));
}

namespace {

struct Pencil {
  Eigen::VectorXd dm1;             // diagonal of D - I
  Eigen::SparseMatrix<double> a;   // adjacency
  Index n = 0;

  explicit Pencil(const KMatrix& k) {
    if (k.rows() != k.cols() || k.rows() % 2 != 0)
      throw ValidationError("K must be square of even order");
    n = k.rows() / 2;
    dm1 = k.topRightCorner(n, n).diagonal();
    a = k.bottomRightCorner(n, n).sparseView();
  }

  // H(mu) = mu^2 I - mu A + (D - I); x_in spans its null space.
  Eigen::SparseMatrix<double> h(double mu, double shift = 0.0) const {
    Eigen::SparseMatrix<double> out = -mu * a;
    Eigen::VectorXd diag = dm1.array() + mu * mu + shift;
    for (Index i = 0; i < n; ++i) out.coeffRef(i, i) += diag(i);
    out.makeCompressed();
    return out;
  }

  double scale(double mu) const {
    return mu * mu + std::abs(mu) * (dm1.maxCoeff() + 1.0) + dm1.cwiseAbs().maxCoeff() + 1.0;
  }
};

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& x) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  return qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
}

Eigen::MatrixXd start_block(Index n, int cols) {
  Eigen::MatrixXd x(n, cols);
  for (Index i = 0; i < n; ++i)
    for (int j = 0; j < cols; ++j) x(i, j) = 1.0 + 0.5 * std::cos(1.0 + 0.7 * i * (j + 1) + 0.3 * j);
  return orthonormalize(x);
}

// Inverse iteration on H(mu): columns converge to the eigenvectors of H whose
// eigenvalues are closest to zero.
Eigen::MatrixXd inverse_iterate(const Pencil& p, double mu, Eigen::MatrixXd x, int sweeps) {
  double shift = 1e-10 * p.scale(mu);
  for (int attempt = 0; attempt < 6; ++attempt, shift *= 100.0) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(p.h(mu, shift));
    if (lu.info() != Eigen::Success) continue;
    bool ok = true;
    for (int s = 0; s < sweeps && ok; ++s) {
      Eigen::MatrixXd y = lu.solve(x);
      ok = lu.info() == Eigen::Success && y.allFinite();
      if (ok) x = orthonormalize(y);
    }
    if (ok) return x;
  }
  throw NumericalError("factorization of the shifted pencil failed");
}

void fix_signs(Eigen::MatrixXd& x) {
  for (Index j = 0; j < x.cols(); ++j) {
    const double s = x.col(j).sum();
    Index imax = 0;
    x.col(j).cwiseAbs().maxCoeff(&imax);
    const bool flip = std::abs(s) > 1e-12 * std::sqrt(static_cast<double>(x.rows())) ? s < 0 : x(imax, j) < 0;
    if (flip) x.col(j) *= -1.0;
  }
}

}  // namespace

KEigenpair k_right_eigenpair(const KMatrix& k, double target) {
  const Pencil p(k);
  if (p.n == 0) throw ValidationError("empty K matrix");
  if (std::abs(target) < 1e-8) throw ValidationError("eigenpair extraction needs a nonzero eigenvalue");

  double mu = target;
  Eigen::MatrixXd x = inverse_iterate(p, mu, start_block(p.n, 1), 4);
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd v = x.col(0);
    const double h = v.dot(p.h(mu) * v);
    if (std::abs(h) <= 1e-15 * p.scale(mu)) break;
    const double dh = 2.0 * mu - v.dot(p.a * v);
    if (std::abs(dh) < 1e-300) break;
    const double step = h / dh;
    mu -= step;
    x = inverse_iterate(p, mu, x, 2);
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(mu))) break;
  }
  if (std::abs(mu - target) > 1e-6 * std::max(1.0, std::abs(target)))
    throw ValidationError("no real eigenvalue of K within 1e-6 of " + std::to_string(target));

  fix_signs(x);
  KEigenpair out;
  out.mu = mu;
  out.x_in = x.col(0);
  out.x_out = p.dm1.cwiseProduct(out.x_in) / mu;
  const double norm = std::sqrt(out.x_in.squaredNorm() + out.x_out.squaredNorm());
  out.x_in /= norm;
  out.x_out /= norm;
  // First block of (K - mu) vanishes by construction; the second is -H x / mu.
  const Eigen::VectorXd r2 = -out.x_out + p.a * out.x_in - mu * out.x_in;
  out.residual = r2.norm();
  if (!(out.residual <= 1e-8))
    throw NumericalError("eigenpair residual " + std::to_string(out.residual) +
                         " exceeds 1e-8 (defective or unmatched eigenvalue)");
  return out;
}

KEigenspace k_right_eigenspace(const KMatrix& k, double target, int multiplicity, double spread) {
  if (multiplicity < 1) throw ValidationError("multiplicity must be at least 1");
  if (multiplicity == 1) {
    KEigenpair pair = k_right_eigenpair(k, target);
    KEigenspace s;
    s.mu = pair.mu;
    s.x_in = pair.x_in;
    s.x_out = pair.x_out;
    s.residual = pair.residual;
    return s;
  }
  const Pencil p(k);
  Eigen::MatrixXd x = inverse_iterate(p, target, start_block(p.n, multiplicity), 6);
  // Rayleigh-Ritz inside the subspace for a canonical basis.
  const Eigen::MatrixXd small = x.transpose() * (p.h(target) * x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (small + small.transpose()));
  x = x * es.eigenvectors();
  fix_signs(x);

  KEigenspace out;
  out.mu = target;
  out.degenerate = true;
  out.x_in = x;
  out.x_out = p.dm1.asDiagonal() * x / target;
  double worst = 0.0;
  for (int j = 0; j < multiplicity; ++j) {
    const double norm = std::sqrt(out.x_in.col(j).squaredNorm() + out.x_out.col(j).squaredNorm());
    const Eigen::VectorXd r2 = -out.x_out.col(j) + p.a * out.x_in.col(j) - target * out.x_in.col(j);
    worst = std::max(worst, r2.norm() / norm);
  }
  out.residual = worst;
  if (!(worst <= 1e-8 + 4.0 * spread))
    throw NumericalError("invariant subspace residual " + std::to_string(worst) + " too large");
  return out;
}

}  // namespace nbsc
