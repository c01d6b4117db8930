#include "qet/spectral.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#define lapack_complex_float_real(z) ((z).real())
#define lapack_complex_float_imag(z) ((z).imag())
#define lapack_complex_double_real(z) ((z).real())
#define lapack_complex_double_imag(z) ((z).imag())
#include <lapacke.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "qet/errors.hpp"
#include "qet/kernels.hpp"

namespace qet {

namespace {

// Sum of term norms plus |shift|; cheap upper bound on the spectral radius.
double norm_scale(const Hamiltonian& h) {
  double s = std::abs(h.energy_shift());
  for (const auto& t : h.terms()) s += t.norm();
  return std::max(s, 1.0);
}

bool all_terms_real(const Hamiltonian& h) {
  for (const auto& t : h.terms())
    if (t.matrix().imag().cwiseAbs().maxCoeff() > 1e-14) return false;
  return true;
}

// Dense real-symmetric build; valid only when all_terms_real holds.
Eigen::MatrixXd dense_real(const Hamiltonian& h) {
  const std::size_t dim = h.lattice().hilbert_dimension();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    MatrixXcd full = embed_dense(t.as_operator(), h.lattice().n_sites());
    out += full.real();
  }
  out += h.energy_shift() * Eigen::MatrixXd::Identity(dim, dim);
  return out;
}

struct EigPair {
  double e0, e1;
  VectorXcd ground;
};

EigPair dense_lowest_two(const Hamiltonian& h) {
  const auto dim = static_cast<lapack_int>(h.lattice().hilbert_dimension());
  std::vector<double> w(dim);
  lapack_int found = 0;
  std::vector<lapack_int> isuppz(4);
  VectorXcd ground(dim);

  if (all_terms_real(h)) {
    Eigen::MatrixXd a = dense_real(h);
    Eigen::MatrixXd z(dim, 2);
    const lapack_int info = LAPACKE_dsyevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', dim, a.data(), dim, 0.0, 0.0, 1, 2,
        0.0, &found, w.data(), z.data(), dim, isuppz.data());
    if (info != 0)
      throw EigensolverError("dsyevr failed with info " + std::to_string(info));
    ground = z.col(0).cast<std::complex<double>>();
  } else {
    MatrixXcd a = h.dense();
    MatrixXcd z(dim, 2);
    const lapack_int info = LAPACKE_zheevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', dim, a.data(), dim, 0.0, 0.0, 1, 2,
        0.0, &found, w.data(), z.data(), dim, isuppz.data());
    if (info != 0)
      throw EigensolverError("zheevr failed with info " + std::to_string(info));
    ground = z.col(0);
  }
  if (found < 2)
    throw EigensolverError("dense eigensolver returned fewer than 2 values");
  return {w[0], w[1], std::move(ground)};
}

struct LanczosOut {
  double value = 0.0;
  VectorXcd vector;
  bool converged = false;
};

// Restarted Lanczos with full reorthogonalization for the lowest eigenpair,
// optionally deflated against a fixed vector (used to get the second-lowest
// eigenvalue, degenerate levels included).
LanczosOut lanczos_lowest(const Hamiltonian& h, const SolverOptions& opts,
                          const VectorXcd* deflate) {
  const std::size_t dim = h.lattice().hilbert_dimension();
  const double tol = opts.lanczos_tol * norm_scale(h);
  const int m = std::max(
      2, std::min<int>(opts.lanczos_subspace, static_cast<int>(dim) - (deflate ? 1 : 0)));

  std::mt19937_64 rng(opts.lanczos_seed + (deflate ? 1 : 0));
  std::normal_distribution<double> gauss;
  VectorXcd v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = {gauss(rng), gauss(rng)};

  auto project_out = [&](VectorXcd& x) {
    if (!deflate) return;
    const auto c = kernels::dot(dim, deflate->data(), x.data());
    kernels::axpy(dim, -c, deflate->data(), x.data());
  };

  project_out(v);
  v /= std::sqrt(kernels::norm_sq(dim, v.data()));

  std::vector<VectorXcd> basis;
  std::vector<double> alpha, beta;
  VectorXcd w(dim);

  for (int restart = 0; restart < opts.lanczos_max_restarts; ++restart) {
    basis.clear();
    alpha.clear();
    beta.clear();
    basis.push_back(v);
    bool breakdown = false;

    for (int j = 0; j < m; ++j) {
      h.apply(basis[j], w);
      project_out(w);
      if (j > 0) kernels::axpy(dim, -beta[j - 1], basis[j - 1].data(), w.data());
      const double a = kernels::dot(dim, basis[j].data(), w.data()).real();
      alpha.push_back(a);
      kernels::axpy(dim, std::complex<double>(-a, 0.0), basis[j].data(), w.data());
      // two reorthogonalization passes keep the basis orthogonal to machine
      // precision even for clustered spectra
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) {
          const auto c = kernels::dot(dim, b.data(), w.data());
          kernels::axpy(dim, -c, b.data(), w.data());
        }
      const double nb = std::sqrt(kernels::norm_sq(dim, w.data()));
      if (nb < 1e-13 * norm_scale(h)) {
        breakdown = true;  // exact invariant subspace
        break;
      }
      beta.push_back(nb);
      if (j + 1 < m) basis.push_back(w / nb);
    }

    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const Eigen::VectorXd s = es.eigenvectors().col(0);
    const double theta = es.eigenvalues()(0);

    VectorXcd ritz = VectorXcd::Zero(dim);
    for (int i = 0; i < std::min<int>(k, static_cast<int>(basis.size())); ++i)
      kernels::axpy(dim, std::complex<double>(s[i], 0.0), basis[i].data(),
                    ritz.data());
    project_out(ritz);
    ritz /= std::sqrt(kernels::norm_sq(dim, ritz.data()));

    const double resid =
        (breakdown || k > static_cast<int>(beta.size()))
            ? 0.0
            : std::abs(beta[k - 1] * s[k - 1]);
    if (breakdown || resid <= tol) {
      // true residual check on the Ritz vector
      h.apply(ritz, w);
      project_out(w);
      kernels::axpy(dim, std::complex<double>(-theta, 0.0), ritz.data(), w.data());
      if (std::sqrt(kernels::norm_sq(dim, w.data())) <= 10 * tol)
        return {theta, std::move(ritz), true};
    }
    v = ritz;
  }
  return {0.0, VectorXcd(), false};
}

void validate_region_for_state(const VectorXcd& psi, const Region& region,
                               int* n_out) {
  const auto n = psi.size();
  if (n <= 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("state length is not a power of two");
  int k = 0;
  while ((Eigen::Index{1} << k) < n) ++k;
  if (region.max_site() >= k)
    throw std::invalid_argument("reduction region outside the state space");
  *n_out = k;
}

}  // namespace

GroundState solve_ground(const Hamiltonian& h, const SolverOptions& opts) {
  const std::size_t dim = h.lattice().hilbert_dimension();
  if (dim > opts.max_dimension)
    throw DimensionLimitError("Hilbert dimension " + std::to_string(dim) +
                              " exceeds solver limit " +
                              std::to_string(opts.max_dimension));
  if (dim < 4)
    throw std::invalid_argument("solver needs at least a 2-site chain");

  double e0 = 0.0, e1 = 0.0;
  VectorXcd ground;
  if (dim <= opts.dense_dimension_limit) {
    auto pair = dense_lowest_two(h);
    e0 = pair.e0;
    e1 = pair.e1;
    ground = std::move(pair.ground);
  } else {
    auto first = lanczos_lowest(h, opts, nullptr);
    if (!first.converged)
      throw EigensolverError("Lanczos did not converge for the ground state");
    auto second = lanczos_lowest(h, opts, &first.vector);
    if (!second.converged)
      throw EigensolverError("Lanczos did not converge for the first excited state");
    e0 = first.value;
    e1 = second.value;
    ground = std::move(first.vector);
  }

  ground /= std::sqrt(kernels::norm_sq(ground.size(), ground.data()));

  GroundState gs;
  gs.state = std::move(ground);
  gs.energy_E0 = e0 - h.energy_shift();
  gs.gap_Delta = std::max(e1 - e0, 0.0);
  const double j_scale = std::max(h.J(), 1e-300);
  gs.degenerate = gs.gap_Delta < opts.degeneracy_rel_tol * j_scale;
  return gs;
}

Hamiltonian shift_to_zero(const Hamiltonian& h, const GroundState& gs) {
  if (gs.degenerate)
    throw DegenerateGroundStateError(
        "ground level is degenerate (gap " + std::to_string(gs.gap_Delta) +
        "); the zero-shift convention requires a unique ground state");
  return h.with_shift(-gs.energy_E0);
}

std::vector<double> dense_spectrum(const Hamiltonian& h) {
  const auto dim = static_cast<lapack_int>(h.lattice().hilbert_dimension());
  std::vector<double> w(dim);
  if (all_terms_real(h)) {
    Eigen::MatrixXd a = dense_real(h);
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', dim, a.data(), dim, w.data());
    if (info != 0)
      throw EigensolverError("dsyevd failed with info " + std::to_string(info));
  } else {
    MatrixXcd a = h.dense();
    const lapack_int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', dim, a.data(), dim, w.data());
    if (info != 0)
      throw EigensolverError("zheevd failed with info " + std::to_string(info));
  }
  return w;
}

ReducedOperator reduce(const VectorXcd& psi, const Region& region) {
  int n = 0;
  validate_region_for_state(psi, region, &n);
  const std::size_t m = std::size_t{1} << region.size();
  const std::uint64_t dim = std::uint64_t{1} << n;

  std::uint64_t smask = 0;
  for (int s : region.sites()) smask |= std::uint64_t{1} << s;
  std::vector<std::uint64_t> scatter(m);
  for (std::size_t l = 0; l < m; ++l) {
    std::uint64_t p = 0;
    for (int t = 0; t < region.size(); ++t)
      if ((l >> t) & 1) p |= std::uint64_t{1} << region.sites()[t];
    scatter[l] = p;
  }

  MatrixXcd rho = MatrixXcd::Zero(m, m);
  std::vector<std::complex<double>> amp(m);
  const std::uint64_t last = (dim - 1) & ~smask;
  std::uint64_t e = 0;
  while (true) {
    for (std::size_t l = 0; l < m; ++l) amp[l] = psi[e + scatter[l]];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        rho(i, j) += amp[i] * std::conj(amp[j]);
    if (e == last) break;
    e = ((e | smask) + 1) & ~smask;
  }
  return {region, std::move(rho)};
}

ReducedOperator reduce(const MatrixXcd& full_operator, const Region& region) {
  const auto dim = full_operator.rows();
  if (dim != full_operator.cols() || dim <= 0 || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("operator is not square power-of-two");
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if (region.max_site() >= n)
    throw std::invalid_argument("reduction region outside the operator space");

  const std::size_t m = std::size_t{1} << region.size();
  std::uint64_t smask = 0;
  for (int s : region.sites()) smask |= std::uint64_t{1} << s;
  std::vector<std::uint64_t> scatter(m);
  for (std::size_t l = 0; l < m; ++l) {
    std::uint64_t p = 0;
    for (int t = 0; t < region.size(); ++t)
      if ((l >> t) & 1) p |= std::uint64_t{1} << region.sites()[t];
    scatter[l] = p;
  }

  MatrixXcd rho = MatrixXcd::Zero(m, m);
  const std::uint64_t last = (static_cast<std::uint64_t>(dim) - 1) & ~smask;
  std::uint64_t e = 0;
  while (true) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        rho(i, j) += full_operator(e + scatter[i], e + scatter[j]);
    if (e == last) break;
    e = ((e | smask) + 1) & ~smask;
  }
  return {region, std::move(rho)};
}

double trace_norm(const MatrixXcd& hermitian) {
  if (hermitian.rows() != hermitian.cols())
    throw std::invalid_argument("trace norm needs a square matrix");
  if (hermitian.rows() == 0) return 0.0;
  const double dev = (hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-10)
    throw std::invalid_argument("trace norm input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitian,
                                              Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double trace_norm(const ReducedOperator& r) { return trace_norm(r.matrix); }

double connected_correlator(const GroundState& gs, const LocalOperator& op_y,
                            const LocalOperator& op_z) {
  if (op_y.support.intersects(op_z.support))
    throw std::invalid_argument(
        "connected correlator requires disjoint supports");
  const auto dim = gs.state.size();
  const VectorXcd zg = apply_local_operator(op_z, gs.state);
  const LocalOperator y_dag{op_y.support, op_y.matrix.adjoint()};
  const VectorXcd yg = apply_local_operator(y_dag, gs.state);
  const std::complex<double> joint =
      kernels::dot(dim, yg.data(), zg.data());
  const std::complex<double> ey = local_expectation(op_y, gs.state);
  const std::complex<double> ez = local_expectation(op_z, gs.state);
  return std::abs(joint - ey * ez);
}

}  // namespace qet
