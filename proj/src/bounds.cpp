#include "qet/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qet/errors.hpp"
#include "qet/kernels.hpp"
#include "qet/models.hpp"

namespace qet {

VariationalGap variational_gap(const Hamiltonian& h, const GroundState& gs,
                               const OutcomeRecord& record,
                               const Decoder& decoder) {
  const auto a = static_cast<std::size_t>(record.outcome_index);
  if (a >= decoder.unitaries.size())
    throw std::invalid_argument("outcome index not present in decoder");
  const LocalOperator u{decoder.region_B, decoder.unitaries[a]};

  VariationalGap out{};
  out.lhs = record.injected_energy - record.final_energy;

  // rhs evaluated through fresh operator applications, independent of the
  // protocol-run energies.
  const VectorXcd& psi = record.post_measurement_state;
  const VectorXcd u_psi = apply_local_operator(u, psi);
  const VectorXcd u_g = apply_local_operator(u, gs.state);
  const double tr_d_rho = h.expectation(psi) - h.expectation(u_psi);
  const double tr_d_omega = h.expectation(gs.state) - h.expectation(u_g);
  out.rhs = tr_d_rho - tr_d_omega;
  out.dropped_term = tr_d_omega;
  return out;
}

std::vector<std::pair<int, double>> local_trace_norm_profile(
    const GroundState& gs, const KrausSet& kraus, int outcome,
    std::span<const Region> targets, const Lattice& lat) {
  if (outcome < 0 ||
      static_cast<std::size_t>(outcome) >= kraus.elements.size())
    throw std::invalid_argument("outcome index out of range");

  VectorXcd phi = apply_local_operator(
      {kraus.region_A, kraus.elements[static_cast<std::size_t>(outcome)]},
      gs.state);
  const double p = kernels::norm_sq(phi.size(), phi.data());
  if (p < kOutcomeDiscardThreshold)
    throw std::invalid_argument(
        "outcome probability below the discard threshold");
  phi /= std::sqrt(p);

  std::vector<std::pair<int, double>> profile;
  profile.reserve(targets.size());
  for (const Region& x : targets) {
    if (x.intersects(kraus.region_A))
      throw std::invalid_argument(
          "trace-norm profile target overlaps the measured region");
    const ReducedOperator r1 = reduce(phi, x);
    const ReducedOperator r0 = reduce(gs.state, x);
    profile.emplace_back(region_distance(lat, kraus.region_A, x),
                         trace_norm(MatrixXcd(r1.matrix - r0.matrix)));
  }
  return profile;
}

std::vector<std::pair<int, double>> measure_clustering(
    const GroundState& gs, const Lattice& lat, std::span<const int> distances) {
  if (gs.degenerate)
    throw DegenerateGroundStateError(
        "clustering requires a unique gapped ground state");

  const MatrixXcd* family[3] = {&pauli_x(), &pauli_y(), &pauli_z()};
  std::vector<std::pair<int, double>> samples;
  samples.reserve(distances.size());
  for (int d : distances) {
    if (d < 1 || d >= lat.n_sites())
      throw std::invalid_argument("clustering distance out of range: " +
                                  std::to_string(d));
    double best = 0.0;
    for (int i = 0; i + d < lat.n_sites(); ++i) {
      for (const auto* oy : family)
        for (const auto* oz : family) {
          const double val = connected_correlator(
              gs, LocalOperator{Region{i}, *oy},
              LocalOperator{Region{i + d}, *oz});
          best = std::max(best, val);
        }
    }
    samples.emplace_back(d, best);
  }
  return samples;
}

ClusterFit fit_clustering(std::span<const std::pair<int, double>> samples,
                          int window_min, int window_max) {
  if (window_min > window_max)
    throw std::invalid_argument("empty clustering fit window");

  std::vector<std::pair<int, double>> windowed;
  for (const auto& s : samples)
    if (s.first >= window_min && s.first <= window_max) windowed.push_back(s);
  if (windowed.empty())
    throw std::invalid_argument("no clustering samples inside the fit window");

  std::vector<std::pair<int, double>> usable;
  for (const auto& s : windowed)
    if (s.second > kZeroCorrelationFloor) usable.push_back(s);

  ClusterFit fit;
  fit.window_min = window_min;
  fit.window_max = window_max;
  fit.samples.assign(samples.begin(), samples.end());

  if (usable.empty()) {
    // zero-correlation sentinel (product ground states)
    fit.c = 0.0;
    fit.xi = 0.0;
    fit.r_squared = 1.0;
    fit.quality_ok = true;
    return fit;
  }
  if (usable.size() < 3)
    throw std::invalid_argument(
        "clustering fit needs at least 3 positive samples in the window");

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(usable.size());
  for (const auto& [d, corr] : usable) {
    const double x = static_cast<double>(d);
    const double y = std::log(corr);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double cov = sxy - sx * sy / n;
  const double var_x = sxx - sx * sx / n;
  const double var_y = syy - sy * sy / n;
  const double slope = cov / var_x;
  const double intercept = (sy - slope * sx) / n;
  if (!(slope < 0.0))
    throw std::runtime_error(
        "correlators do not decay over the fit window; no exponential "
        "envelope exists");

  fit.xi = -1.0 / slope;
  fit.c = std::exp(intercept);
  fit.r_squared = var_y > 0 ? (cov * cov) / (var_x * var_y) : 1.0;

  // inflate the prefactor so the envelope dominates every windowed sample
  double factor = 1.0;
  for (const auto& [d, corr] : usable)
    factor = std::max(factor, corr / (fit.c * std::exp(-d / fit.xi)));
  fit.c *= factor * (1.0 + 1e-12);

  fit.quality_ok = fit.r_squared >= kFitQualityR2Threshold &&
                   fit.xi <= static_cast<double>(window_max - window_min);
  return fit;
}

double kraus_weight_sum(const KrausSet& k) {
  double s = 0.0;
  for (const auto& m : k.elements) s += operator_norm(MatrixXcd(m.adjoint() * m));
  return s;
}

BoundCertificate main_certificate(const ClusterFit& fit, const KrausSet& kraus,
                                  const Hamiltonian& h, const Region& a,
                                  const Region& b) {
  if (fit.degenerate())
    throw std::invalid_argument(
        "degenerate clustering fit carries no certificate; extraction is "
        "zero by the product-state argument");
  if (a.intersects(b))
    throw std::invalid_argument("certificate regions must be disjoint");

  BoundCertificate cert;
  cert.S_A = kraus_weight_sum(kraus);
  cert.S_B = boundary_sum(h, b);
  cert.c = fit.c;
  cert.xi = fit.xi;
  cert.range_r = h.range_r();
  cert.separation_d = region_distance(h.lattice(), a, b);
  cert.C = 2.0 * fit.c * cert.S_A * cert.S_B * std::exp(cert.range_r / fit.xi);
  cert.mu = 1.0 / fit.xi;
  return cert;
}

std::vector<ConjugationCommutatorPair> conjugation_commutator_pairs(
    const Decoder& decoder, const Hamiltonian& h, const Region& b) {
  if (!decoder.generators)
    throw std::invalid_argument(
        "refined certificate requires decoder generators");

  std::vector<ConjugationCommutatorPair> pairs;
  const auto bterms = boundary_terms(h, b);
  for (std::size_t a = 0; a < decoder.unitaries.size(); ++a) {
    for (const auto& t : bterms) {
      const Region support = region_union(decoder.region_B, t.support());
      const MatrixXcd u =
          embed_into({decoder.region_B, decoder.unitaries[a]}, support);
      const MatrixXcd g =
          embed_into({decoder.region_B, (*decoder.generators)[a]}, support);
      const MatrixXcd ht = embed_into(t.as_operator(), support);
      pairs.push_back({static_cast<int>(a), t.support(),
                       operator_norm(MatrixXcd(u.adjoint() * ht * u - ht)),
                       operator_norm(MatrixXcd(g * ht - ht * g))});
    }
  }
  return pairs;
}

BoundCertificate refined_certificate(const ClusterFit& fit,
                                     const KrausSet& kraus,
                                     const Decoder& decoder,
                                     const Hamiltonian& h, const Region& b) {
  if (kraus.elements.size() != decoder.unitaries.size())
    throw std::invalid_argument("outcome sets of measurement and decoder differ");
  BoundCertificate cert = main_certificate(fit, kraus, h, kraus.region_A, b);

  const auto pairs = conjugation_commutator_pairs(decoder, h, b);
  cert.commutator_sums.assign(decoder.unitaries.size(), 0.0);
  for (const auto& p : pairs)
    cert.commutator_sums[static_cast<std::size_t>(p.outcome)] +=
        p.commutator_norm;

  double weighted = 0.0;
  for (std::size_t a = 0; a < kraus.elements.size(); ++a) {
    const double w =
        operator_norm(MatrixXcd(kraus.elements[a].adjoint() * kraus.elements[a]));
    weighted += w * cert.commutator_sums[a];
  }
  cert.C_tilde = fit.c * std::exp(cert.range_r / fit.xi) * weighted;
  return cert;
}

}  // namespace qet
