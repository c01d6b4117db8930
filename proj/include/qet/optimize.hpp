#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qet/bounds.hpp"

namespace qet {

// Searchable protocol family on single-site regions. Parameter layout:
// measurement parameters first, then three generator coefficients (X, Y, Z
// basis, box [-pi, pi]) per outcome.
//
// Families:
//   "bloch_projective" - rank-one projective pair along a Bloch axis,
//                        measurement params (theta, phi)
//   "povm_sqrt"        - two-outcome POVM M_0 = sqrt(E), M_1 = sqrt(I - E)
//                        with E = (I + sin(psi) n.sigma)/2, measurement
//                        params (psi, theta, phi)
class ProtocolScheme {
 public:
  ProtocolScheme(std::string name, Region region_a, Region region_b);

  const std::string& name() const { return name_; }
  const Region& region_a() const { return region_a_; }
  const Region& region_b() const { return region_b_; }
  int n_outcomes() const { return 2; }
  int n_measurement_params() const;
  int n_params() const;
  const std::vector<std::pair<double, double>>& parameter_bounds() const {
    return bounds_;
  }

 private:
  std::string name_;
  Region region_a_;
  Region region_b_;
  std::vector<std::pair<double, double>> bounds_;
};

// Builds the concrete measurement and decoder at a parameter point. Throws
// on out-of-bounds parameters; any in-bounds point yields a valid
// (completeness-checked) Kraus set and Hermitian generators.
std::pair<KrausSet, Decoder> instantiate(const ProtocolScheme& scheme,
                                         std::span<const double> params);

struct OptResult {
  std::vector<double> best_parameters;
  double best_Delta_E = 0.0;
  std::size_t evaluations = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::size_t, double>> trace;  // (evaluation, best so far)
};

// Multi-start Nelder-Mead maximization of Delta E over the scheme family.
// Deterministic given (inputs, seed, budget): the budget is partitioned over
// restarts up front and results are merged in restart order, so concurrent
// execution cannot change the outcome. Ties keep the earliest point found.
OptResult maximize_extraction(const Hamiltonian& h, const GroundState& gs,
                              const Region& region_a, const Region& region_b,
                              const ProtocolScheme& scheme, std::size_t budget,
                              std::uint64_t seed, int restarts = 8);

// Exhaustive evaluation over a uniform parameter grid; the independent
// reference for optimizer tests. Refuses grids above 10^7 points or chains
// above 6 sites.
double brute_force_oracle(const Hamiltonian& h, const GroundState& gs,
                          const Region& region_a, const Region& region_b,
                          const ProtocolScheme& scheme, int grid_resolution);

}  // namespace qet
