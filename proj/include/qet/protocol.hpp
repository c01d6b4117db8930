#pragma once

#include <optional>
#include <vector>

#include "qet/spectral.hpp"

namespace qet {

// Alice's generalized measurement: Kraus operators on region A.
struct KrausSet {
  Region region_A;
  std::vector<MatrixXcd> elements;
  double norm_bound_m = 0.0;  // cached by validate_kraus
};

// Checks the completeness relation sum_a M_a^dag M_a = I_A to 1e-10 and
// caches the largest element norm. Throws CompletenessError on violation.
void validate_kraus(KrausSet& k);

// Bob's outcome-conditioned unitaries on region B. When generators are
// present, unitaries[a] = exp(i generators[a]).
struct Decoder {
  Region region_B;
  std::vector<MatrixXcd> unitaries;
  std::optional<std::vector<MatrixXcd>> generators;
};

MatrixXcd unitary_from_generator(const MatrixXcd& g);

Decoder decoder_from_generators(Region region_B,
                                std::vector<MatrixXcd> generators);

// Unitarity to 1e-10; generator consistency to 1e-9 when present.
void validate_decoder(const Decoder& d);

// Per-outcome record. States are pure by construction (the protocol starts
// from a pure ground state), so the full-space density operators rho_a and
// sigma_a are the rank-one projectors onto these vectors; rho()/sigma()
// materialize them for small systems only.
struct OutcomeRecord {
  int outcome_index = 0;
  double probability = 0.0;
  VectorXcd post_measurement_state;
  VectorXcd post_decoding_state;
  double injected_energy = 0.0;  // tr[H rho_a]
  double final_energy = 0.0;     // tr[H sigma_a]

  MatrixXcd rho() const;
  MatrixXcd sigma() const;

  static constexpr std::size_t kDensityMatrixLimit = std::size_t{1} << 12;
};

struct ProtocolResult {
  std::vector<OutcomeRecord> outcomes;
  double E_A = 0.0;      // average injected excess energy
  double E_B = 0.0;      // average post-decoding excess energy
  double Delta_E = 0.0;  // E_A - E_B
  double discarded_probability_mass = 0.0;
};

// Outcomes with Born probability below this are dropped (their mass is
// recorded); the normalized post-measurement state is undefined at p_a = 0.
inline constexpr double kOutcomeDiscardThreshold = 1e-12;

// Executes measurement / communication / extraction on the shifted
// Hamiltonian (ground energy zero), returning per-outcome states and the
// averaged excess energies.
ProtocolResult run_protocol(const Hamiltonian& h, const GroundState& gs,
                            const KrausSet& kraus, const Decoder& decoder);

// sum_a <G| M_a^dag H M_a |G>. Agrees with ProtocolResult::E_A.
double energy_injection(const GroundState& gs, const Hamiltonian& h,
                        const KrausSet& kraus);

// Residual of the final-energy decomposition
//   E_fin = E_A + sum_a <G| M_a^dag (U_a^dag [H, U_a]) M_a |G>,
// where the commutator term is assembled from boundary-local operators and
// the left side comes from the protocol result. Contract: <= 1e-9.
double bookkeeping_check(const ProtocolResult& result, const Hamiltonian& h,
                         const GroundState& gs, const KrausSet& kraus,
                         const Decoder& decoder);

}  // namespace qet
