#include "qet/protocol.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

#include "qet/errors.hpp"
#include "qet/kernels.hpp"

namespace qet {

void validate_kraus(KrausSet& k) {
  if (k.elements.empty())
    throw std::invalid_argument("Kraus set has no elements");
  const auto dim = Eigen::Index{1} << k.region_A.size();
  for (const auto& m : k.elements)
    if (m.rows() != dim || m.cols() != dim)
      throw std::invalid_argument(
          "Kraus element dimension does not match region A");

  MatrixXcd sum = MatrixXcd::Zero(dim, dim);
  for (const auto& m : k.elements) sum += m.adjoint() * m;
  const double dev =
      operator_norm(sum - MatrixXcd::Identity(dim, dim));
  if (dev > 1e-10)
    throw CompletenessError(
        "Kraus completeness violated: ||sum M^dag M - I|| = " +
            std::to_string(dev),
        dev);

  double bound = 0.0;
  for (const auto& m : k.elements) bound = std::max(bound, operator_norm(m));
  k.norm_bound_m = bound;
}

MatrixXcd unitary_from_generator(const MatrixXcd& g) {
  const double dev = (g - g.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-12)
    throw std::invalid_argument("generator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g);
  const auto& v = es.eigenvectors();
  VectorXcd phases(g.rows());
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    phases[i] = std::exp(std::complex<double>(0.0, es.eigenvalues()(i)));
  return v * phases.asDiagonal() * v.adjoint();
}

Decoder decoder_from_generators(Region region_B,
                                std::vector<MatrixXcd> generators) {
  std::vector<MatrixXcd> unitaries;
  unitaries.reserve(generators.size());
  for (const auto& g : generators)
    unitaries.push_back(unitary_from_generator(g));
  return Decoder{std::move(region_B), std::move(unitaries),
                 std::move(generators)};
}

void validate_decoder(const Decoder& d) {
  if (d.unitaries.empty())
    throw std::invalid_argument("decoder has no unitaries");
  const auto dim = Eigen::Index{1} << d.region_B.size();
  for (const auto& u : d.unitaries) {
    if (u.rows() != dim || u.cols() != dim)
      throw std::invalid_argument(
          "decoder unitary dimension does not match region B");
    const double dev =
        operator_norm(u.adjoint() * u - MatrixXcd::Identity(dim, dim));
    if (dev > 1e-10)
      throw std::invalid_argument("decoder matrix is not unitary (deviation " +
                                  std::to_string(dev) + ")");
  }
  if (d.generators) {
    if (d.generators->size() != d.unitaries.size())
      throw std::invalid_argument("generator count does not match unitaries");
    for (std::size_t a = 0; a < d.unitaries.size(); ++a) {
      const double dev =
          ((*d.generators)[a].rows() == dim)
              ? operator_norm(unitary_from_generator((*d.generators)[a]) -
                              d.unitaries[a])
              : 1.0;
      if (dev > 1e-9)
        throw std::invalid_argument(
            "generator does not reproduce decoder unitary " + std::to_string(a));
    }
  }
}

MatrixXcd OutcomeRecord::rho() const {
  if (static_cast<std::size_t>(post_measurement_state.size()) >
      kDensityMatrixLimit)
    throw DimensionLimitError(
        "density-operator materialization refused at this dimension");
  return post_measurement_state * post_measurement_state.adjoint();
}

MatrixXcd OutcomeRecord::sigma() const {
  if (static_cast<std::size_t>(post_decoding_state.size()) >
      kDensityMatrixLimit)
    throw DimensionLimitError(
        "density-operator materialization refused at this dimension");
  return post_decoding_state * post_decoding_state.adjoint();
}

ProtocolResult run_protocol(const Hamiltonian& h, const GroundState& gs,
                            const KrausSet& kraus, const Decoder& decoder) {
  if (kraus.region_A.intersects(decoder.region_B))
    throw std::invalid_argument("regions A and B must be disjoint");
  if (kraus.elements.size() != decoder.unitaries.size())
    throw std::invalid_argument(
        "measurement and decoder outcome sets differ (" +
        std::to_string(kraus.elements.size()) + " vs " +
        std::to_string(decoder.unitaries.size()) + ")");
  kraus.region_A.validate_within(h.lattice());
  decoder.region_B.validate_within(h.lattice());
  KrausSet checked = kraus;
  validate_kraus(checked);

  ProtocolResult result;
  const auto dim = gs.state.size();
  for (std::size_t a = 0; a < checked.elements.size(); ++a) {
    VectorXcd phi =
        apply_local_operator({checked.region_A, checked.elements[a]}, gs.state);
    const double p = kernels::norm_sq(dim, phi.data());
    if (p < kOutcomeDiscardThreshold) {
      result.discarded_probability_mass += p;
      continue;
    }
    OutcomeRecord rec;
    rec.outcome_index = static_cast<int>(a);
    rec.probability = p;
    phi /= std::sqrt(p);
    rec.post_decoding_state =
        apply_local_operator({decoder.region_B, decoder.unitaries[a]}, phi);
    rec.post_measurement_state = std::move(phi);
    rec.injected_energy = h.expectation(rec.post_measurement_state);
    rec.final_energy = h.expectation(rec.post_decoding_state);
    result.E_A += p * rec.injected_energy;
    result.E_B += p * rec.final_energy;
    result.outcomes.push_back(std::move(rec));
  }
  if (result.outcomes.empty())
    throw std::runtime_error("all outcomes fell below the discard threshold");
  result.Delta_E = result.E_A - result.E_B;
  return result;
}

double energy_injection(const GroundState& gs, const Hamiltonian& h,
                        const KrausSet& kraus) {
  KrausSet checked = kraus;
  validate_kraus(checked);
  double total = 0.0;
  for (const auto& m : checked.elements) {
    const VectorXcd w = apply_local_operator({checked.region_A, m}, gs.state);
    total += h.expectation(w);
  }
  return total;
}

double bookkeeping_check(const ProtocolResult& result, const Hamiltonian& h,
                         const GroundState& gs, const KrausSet& kraus,
                         const Decoder& decoder) {
  if (kraus.elements.size() != decoder.unitaries.size())
    throw std::invalid_argument("outcome sets differ");
  if (result.outcomes.size() > kraus.elements.size())
    throw std::invalid_argument(
        "protocol result does not match the supplied measurement");

  // Direct side: total final energy from the protocol result.
  double e_fin_direct = 0.0;
  for (const auto& rec : result.outcomes)
    e_fin_direct += rec.probability * rec.final_energy;

  // Independent side: E_A plus the boundary-local commutator term. The
  // operator U_a^dag [H, U_a] only involves terms touching B, so it lives on
  // the union of B with those supports.
  const auto bterms = boundary_terms(h, decoder.region_B);
  Region t_region = decoder.region_B;
  for (const auto& bt : bterms) t_region = region_union(t_region, bt.support());

  double correlation_term = 0.0;
  for (std::size_t a = 0; a < kraus.elements.size(); ++a) {
    const MatrixXcd u_t =
        embed_into({decoder.region_B, decoder.unitaries[a]}, t_region);
    MatrixXcd o_t = MatrixXcd::Zero(u_t.rows(), u_t.cols());
    for (const auto& bt : bterms) {
      const MatrixXcd h_t = embed_into(bt.as_operator(), t_region);
      o_t += u_t.adjoint() * h_t * u_t - h_t;
    }
    const VectorXcd w =
        apply_local_operator({kraus.region_A, kraus.elements[a]}, gs.state);
    correlation_term += local_expectation({t_region, o_t}, w).real();
  }

  const double e_a = energy_injection(gs, h, kraus);
  return std::abs(e_fin_direct - (e_a + correlation_term));
}

}  // namespace qet
