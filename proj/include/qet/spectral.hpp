#pragma once

#include <cstdint>
#include <vector>

#include "qet/hamiltonian.hpp"

namespace qet {

struct SolverOptions {
  // Dense diagonalization up to this dimension; a restarted Lanczos solver
  // (lowest two eigenpairs via deflation) takes over beyond it.
  std::size_t dense_dimension_limit = std::size_t{1} << 14;
  std::size_t max_dimension = std::size_t{1} << 20;

  // The ground level counts as degenerate when gap < degeneracy_rel_tol * J.
  double degeneracy_rel_tol = 1e-8;

  double lanczos_tol = 1e-12;  // residual tolerance, relative to sum of norms
  int lanczos_subspace = 40;
  int lanczos_max_restarts = 800;
  std::uint64_t lanczos_seed = 0x9e3779b97f4a7c15ull;
};

struct GroundState {
  VectorXcd state;          // normalized ground vector
  double energy_E0 = 0.0;   // ground energy of the unshifted term sum
  double gap_Delta = 0.0;   // distance to the second eigenvalue
  bool degenerate = false;
};

// Lowest eigenpair and gap of h (shift included in the solve; energy_E0 is
// reported with the shift removed). Throws DimensionLimitError /
// EigensolverError.
GroundState solve_ground(const Hamiltonian& h, const SolverOptions& opts = {});

// Returns h with its shift set so the ground energy is zero and the spectrum
// nonnegative. Refuses degenerate ground levels.
Hamiltonian shift_to_zero(const Hamiltonian& h, const GroundState& gs);

// All eigenvalues of the (shift-included) Hamiltonian, ascending. Dense only.
std::vector<double> dense_spectrum(const Hamiltonian& h);

struct ReducedOperator {
  Region support;
  MatrixXcd matrix;
};

// Partial trace of |psi><psi| onto `region` (complement traced out).
ReducedOperator reduce(const VectorXcd& psi, const Region& region);

// Partial trace of a full-space operator onto `region`.
ReducedOperator reduce(const MatrixXcd& full_operator, const Region& region);

// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const MatrixXcd& hermitian);
double trace_norm(const ReducedOperator& r);

// | <G|O_Y O_Z|G> - <G|O_Y|G><G|O_Z|G> | for operators on disjoint supports.
double connected_correlator(const GroundState& gs, const LocalOperator& op_y,
                            const LocalOperator& op_z);

}  // namespace qet
