#pragma once

#include <span>
#include <utility>

#include "qet/protocol.hpp"

namespace qet {

// Exponential-clustering envelope fitted from measured correlators. The fit
// is an envelope, not a regression mean: after the log-linear fit the
// prefactor is inflated so every windowed sample obeys
// corr <= c * exp(-distance/xi) (up to 1e-9 relative slack).
//
// c == 0 is the degenerate sentinel for zero-correlation (product) ground
// states; xi is meaningless there and callers must branch.
struct ClusterFit {
  double c = 0.0;
  double xi = 0.0;
  int window_min = 0;
  int window_max = 0;
  double r_squared = 0.0;
  bool quality_ok = true;
  std::vector<std::pair<int, double>> samples;

  bool degenerate() const { return c == 0.0; }
};

// Fit-quality warning. Two signals: a poor log-linear fit (r^2 below the
// threshold), or a fitted correlation length exceeding the window span. The
// second catches critical chains, where slow polynomial decay still produces
// a deceptively straight log plot at desk sizes but the extrapolated
// envelope has not observed genuine exponential decay.
inline constexpr double kFitQualityR2Threshold = 0.99;

// Correlators at or below this floor count as exactly zero.
inline constexpr double kZeroCorrelationFloor = 1e-13;

// Certificate (C, mu) such that the extractable energy at separation d obeys
// Delta E <= C * exp(-mu * d); C_tilde is the commutator-refined prefactor
// when decoder generators are available.
struct BoundCertificate {
  double S_A = 0.0;  // sum_a ||M_a^dag M_a||
  double S_B = 0.0;  // boundary sum over terms touching B
  double c = 0.0;
  double xi = 0.0;
  int range_r = 0;
  int separation_d = 0;
  double C = 0.0;
  double mu = 0.0;
  std::optional<double> C_tilde;
  std::vector<double> commutator_sums;  // per outcome, sum_X ||[G_a, h_X]||
};

struct VariationalGap {
  double lhs;           // tr[H rho_a] - tr[H sigma_a]
  double rhs;           // tr[(H - U^dag H U)(rho_a - omega)]
  double dropped_term;  // tr[(H - U^dag H U) omega], non-positive
};

// Per-outcome variational inequality: lhs <= rhs up to numerical slack, with
// the dropped ground-state term evaluated explicitly.
VariationalGap variational_gap(const Hamiltonian& h, const GroundState& gs,
                               const OutcomeRecord& record,
                               const Decoder& decoder);

// For each target region X: (distance from A to X, ||(rho_a - omega)_X||_1).
// Targets must be disjoint from A.
std::vector<std::pair<int, double>> local_trace_norm_profile(
    const GroundState& gs, const KrausSet& kraus, int outcome,
    std::span<const Region> targets, const Lattice& lat);

// Maximum connected correlator over the unit-norm single-site Pauli family,
// maximized over operator pairs and over site pairs at each separation.
// Refuses degenerate ground states.
std::vector<std::pair<int, double>> measure_clustering(
    const GroundState& gs, const Lattice& lat, std::span<const int> distances);

// Envelope fit over the window [window_min, window_max]. Throws when fewer
// than 3 usable (positive) samples exist, unless all windowed samples are
// zero, in which case the degenerate sentinel is returned.
ClusterFit fit_clustering(std::span<const std::pair<int, double>> samples,
                          int window_min, int window_max);

double kraus_weight_sum(const KrausSet& k);  // S_A

// C = 2 c S_A S_B e^{r/xi}, mu = 1/xi.
BoundCertificate main_certificate(const ClusterFit& fit, const KrausSet& kraus,
                                  const Hamiltonian& h, const Region& a,
                                  const Region& b);

struct ConjugationCommutatorPair {
  int outcome;
  Region term_support;
  double conjugation_norm;  // ||U^dag h_X U - h_X||
  double commutator_norm;   // ||[G, h_X]||, dominates the first
};

// Per (outcome, boundary term) norms; requires decoder generators.
std::vector<ConjugationCommutatorPair> conjugation_commutator_pairs(
    const Decoder& decoder, const Hamiltonian& h, const Region& b);

// Adds C_tilde = c e^{r/xi} sum_a ||M_a^dag M_a|| sum_X ||[G_a, h_X]|| on
// top of the main certificate.
BoundCertificate refined_certificate(const ClusterFit& fit,
                                     const KrausSet& kraus,
                                     const Decoder& decoder,
                                     const Hamiltonian& h, const Region& b);

}  // namespace qet
