#pragma once

#include <Eigen/Dense>

#include <vector>

#include "qet/lattice.hpp"

namespace qet {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Largest singular value.
double operator_norm(const MatrixXcd& m);

// Dense operator on the tensor factor of a few sites. Bit t of the local
// basis index corresponds to support.sites()[t]; matrices are column-major
// (Eigen default) and the embedding into the full space tensors identities
// onto all other sites.
struct LocalOperator {
  Region support;
  MatrixXcd matrix;

  LocalOperator(Region support_in, MatrixXcd matrix_in);
};

// Hermitian local operator with cached operator norm.
class LocalTerm {
 public:
  LocalTerm(Region support, MatrixXcd op);  // checks Hermiticity to 1e-12

  const Region& support() const { return support_; }
  const MatrixXcd& matrix() const { return matrix_; }
  double norm() const { return norm_; }

  LocalOperator as_operator() const { return {support_, matrix_}; }

 private:
  Region support_;
  MatrixXcd matrix_;
  double norm_;
};

// Sum of embedded local terms plus a scalar shift. J (uniform norm bound)
// and the interaction range are computed from the terms; the shift is kept
// separate so term norms and boundary sums always refer to the unshifted
// local pieces.
class Hamiltonian {
 public:
  Hamiltonian(Lattice lattice, std::vector<LocalTerm> terms,
              double energy_shift = 0.0);

  const Lattice& lattice() const { return lattice_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  double J() const { return j_; }
  int range_r() const { return range_r_; }
  double energy_shift() const { return energy_shift_; }

  Hamiltonian with_shift(double shift) const;

  // y = H x, including the shift. x and y must have the full Hilbert
  // dimension and must not alias.
  void apply(const VectorXcd& x, VectorXcd& y) const;

  // Re <x|H|x> for a normalized x.
  double expectation(const VectorXcd& x) const;

  MatrixXcd dense() const;  // refuses above kDenseBuildLimit

  static constexpr std::size_t kDenseBuildLimit = std::size_t{1} << 14;

 private:
  Lattice lattice_;
  std::vector<LocalTerm> terms_;
  double j_ = 0.0;
  int range_r_ = 0;
  double energy_shift_ = 0.0;
};

// Terms whose support intersects b, ordered by (min site, diameter,
// original position).
std::vector<LocalTerm> boundary_terms(const Hamiltonian& h, const Region& b);

// Sum of the cached norms of boundary_terms(h, b).
double boundary_sum(const Hamiltonian& h, const Region& b);

// (op ⊗ I) x
VectorXcd apply_local_operator(const LocalOperator& op, const VectorXcd& x);

// <x| (op ⊗ I) |x>
std::complex<double> local_expectation(const LocalOperator& op,
                                       const VectorXcd& x);

// Dense embedding of a local operator into the full space (small systems;
// used by oracles and the bookkeeping identity).
MatrixXcd embed_dense(const LocalOperator& op, int n_sites);

Region region_union(const Region& a, const Region& b);

// Embedding of op onto a superset region (identity on the extra sites).
// Needed when combining operators with different supports, e.g. commutators
// between a decoder generator and a boundary term.
MatrixXcd embed_into(const LocalOperator& op, const Region& target);

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b);

}  // namespace qet
