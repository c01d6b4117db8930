#include <doctest.h>

#include <cmath>
#include <random>

#include "qet/errors.hpp"
#include "qet/models.hpp"
#include "qet/optimize.hpp"
#include "support/test_helpers.hpp"

using namespace qet;

namespace {

struct Solved {
  Hamiltonian h;
  GroundState gs;
};

Solved solved(const char* name, int n, double g) {
  ModelSpec spec;
  spec.name = name;
  spec.g = g;
  const Hamiltonian h0 = build_chain(n, spec);
  const GroundState gs = solve_ground(h0);
  return {shift_to_zero(h0, gs), gs};
}

}  // namespace

TEST_CASE("scheme anchors") {
  const ProtocolScheme scheme("bloch_projective", Region{0}, Region{3});
  CHECK(scheme.n_params() == 8);

  // theta = 0: computational-basis projectors
  std::vector<double> params(8, 0.0);
  auto [kraus, decoder] = instantiate(scheme, params);
  MatrixXcd p0(2, 2), p1(2, 2);
  p0 << 1, 0, 0, 0;
  p1 << 0, 0, 0, 1;
  CHECK((kraus.elements[0] - p0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((kraus.elements[1] - p1).cwiseAbs().maxCoeff() < 1e-14);

  // zero generator coefficients: identity decoders
  for (const auto& u : decoder.unitaries)
    CHECK((u - MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

  params[0] = 4.0;  // theta outside [0, pi]
  CHECK_THROWS_AS(instantiate(scheme, params), std::invalid_argument);
  CHECK_THROWS_AS(instantiate(scheme, std::vector<double>(3, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("scheme construction preconditions") {
  CHECK_THROWS_AS(ProtocolScheme("simulated_annealing", Region{0}, Region{3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProtocolScheme("bloch_projective", Region{0, 1}, Region{3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProtocolScheme("bloch_projective", Region{2}, Region{2}),
                  std::invalid_argument);
}

TEST_CASE("every in-bounds point instantiates a valid protocol") {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (const char* name : {"bloch_projective", "povm_sqrt"}) {
    const ProtocolScheme scheme(name, Region{1}, Region{4});
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> params;
      for (const auto& [lo, hi] : scheme.parameter_bounds())
        params.push_back(lo + (hi - lo) * uni(rng));
      auto [kraus, decoder] = instantiate(scheme, params);
      // instantiate() has already enforced completeness; check the caches
      CHECK(kraus.norm_bound_m <= 1.0 + 1e-12);
      REQUIRE(decoder.generators.has_value());
      for (const auto& g : *decoder.generators)
        CHECK((g - g.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
      validate_decoder(decoder);
    }
  }
}

TEST_CASE("povm family is measurement-free at psi = 0") {
  // sin(psi) = 0 makes both elements proportional to the identity, so the
  // post-measurement state is the ground state and passivity pins Delta E <= 0
  const auto [h, gs] = solved("tfim", 6, 2.0);
  const ProtocolScheme scheme("povm_sqrt", Region{0}, Region{4});
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> params(static_cast<std::size_t>(scheme.n_params()));
    params[0] = 0.0;
    params[1] = 1.0;
    params[2] = 0.5;
    for (std::size_t i = 3; i < params.size(); ++i) params[i] = uni(rng);
    auto [kraus, decoder] = instantiate(scheme, params);
    const auto result = run_protocol(h, gs, kraus, decoder);
    CHECK(std::abs(result.E_A) < 1e-10);
    CHECK(result.Delta_E <= 1e-10);
  }
}

TEST_CASE("product models admit no optimizable extraction") {
  const auto [h, gs] = solved("field_only", 6, 1.0);
  for (const char* name : {"bloch_projective", "povm_sqrt"}) {
    const ProtocolScheme scheme(name, Region{0}, Region{4});
    const auto opt = maximize_extraction(h, gs, Region{0}, Region{4}, scheme,
                                         600, 11);
    CHECK(opt.best_Delta_E <= 1e-10);
  }
}

TEST_CASE("optimizer is deterministic under a fixed seed") {
  const auto [h, gs] = solved("tfim", 6, 2.0);
  // adjacent regions so the optimum is solidly positive and seed-dependent
  const ProtocolScheme scheme("bloch_projective", Region{0}, Region{1});
  const auto a = maximize_extraction(h, gs, Region{0}, Region{1}, scheme, 800, 42);
  const auto b = maximize_extraction(h, gs, Region{0}, Region{1}, scheme, 800, 42);
  CHECK(a.best_Delta_E == b.best_Delta_E);
  CHECK(a.best_parameters == b.best_parameters);
  CHECK(a.evaluations == b.evaluations);
  CHECK(a.trace == b.trace);
  CHECK(a.best_Delta_E > 0.0);

  const auto c = maximize_extraction(h, gs, Region{0}, Region{1}, scheme, 800, 43);
  CHECK(a.best_Delta_E != c.best_Delta_E);  // different seed explores differently
}

TEST_CASE("optimizer respects its budget and reports a nondecreasing trace") {
  const auto [h, gs] = solved("tfim", 6, 2.0);
  const ProtocolScheme scheme("bloch_projective", Region{0}, Region{4});
  const auto opt =
      maximize_extraction(h, gs, Region{0}, Region{4}, scheme, 500, 7);
  CHECK(opt.evaluations <= 500);
  double prev = -1e300;
  std::size_t prev_idx = 0;
  for (const auto& [idx, val] : opt.trace) {
    CHECK(val > prev);
    CHECK(idx > prev_idx);
    prev = val;
    prev_idx = idx;
  }
  CHECK(opt.best_Delta_E == doctest::Approx(prev).epsilon(1e-10));

  // re-evaluation at the best parameters reproduces the reported optimum
  auto [kraus, decoder] = instantiate(scheme, opt.best_parameters);
  const auto result = run_protocol(h, gs, kraus, decoder);
  CHECK(std::abs(result.Delta_E - opt.best_Delta_E) < 1e-10);
}

TEST_CASE("optimizer reaches or exceeds the brute-force grid") {
  const auto [h, gs] = solved("tfim", 4, 2.0);
  const Region a{0}, b{3};
  const ProtocolScheme scheme("bloch_projective", a, b);
  const double grid = brute_force_oracle(h, gs, a, b, scheme, 3);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const auto opt = maximize_extraction(h, gs, a, b, scheme, 3000, seed);
    CHECK(opt.best_Delta_E >= grid - 1e-6);
    CHECK(opt.best_Delta_E > 0.0);
  }
}

TEST_CASE("short-range extraction on the gapped chain is strictly positive") {
  const auto [h, gs] = solved("tfim", 8, 2.0);
  const ProtocolScheme scheme("bloch_projective", Region{0}, Region{1});
  const auto opt =
      maximize_extraction(h, gs, Region{0}, Region{1}, scheme, 3000, 5);
  CHECK(opt.best_Delta_E > 0.01);
}

TEST_CASE("oracle guardrails") {
  const auto [h, gs] = solved("tfim", 4, 2.0);
  const ProtocolScheme scheme("bloch_projective", Region{0}, Region{3});
  CHECK_THROWS_AS(brute_force_oracle(h, gs, Region{0}, Region{3}, scheme, 12),
                  std::invalid_argument);  // 12^8 > 1e7
  CHECK_THROWS_AS(brute_force_oracle(h, gs, Region{0}, Region{3}, scheme, 1),
                  std::invalid_argument);

  const auto big = solved("tfim", 8, 2.0);
  const ProtocolScheme s8("bloch_projective", Region{0}, Region{7});
  CHECK_THROWS_AS(
      brute_force_oracle(big.h, big.gs, Region{0}, Region{7}, s8, 3),
      std::invalid_argument);

  CHECK_THROWS_AS(maximize_extraction(h, gs, Region{0}, Region{3}, scheme, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("evaluated points respect the certificate chain") {
  const auto [h, gs] = solved("tfim", 8, 2.0);
  const Region a{0}, b{5};
  const std::vector<int> distances{2, 3, 4, 5, 6};
  const auto fit =
      fit_clustering(measure_clustering(gs, h.lattice(), distances), 2, 5);
  REQUIRE(!fit.degenerate());

  const ProtocolScheme scheme("bloch_projective", a, b);
  const auto opt = maximize_extraction(h, gs, a, b, scheme, 1500, 3);
  auto [kbest, dbest] = instantiate(scheme, opt.best_parameters);
  const auto cert = refined_certificate(fit, kbest, dbest, h, b);
  const double d = cert.separation_d;
  CHECK(opt.best_Delta_E <= cert.C * std::exp(-cert.mu * d) + 1e-9);
  REQUIRE(cert.C_tilde.has_value());
  CHECK(opt.best_Delta_E <= *cert.C_tilde * std::exp(-cert.mu * d) + 1e-9);

  // random family points obey the same bound
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> params;
    for (const auto& [lo, hi] : scheme.parameter_bounds())
      params.push_back(lo + (hi - lo) * uni(rng));
    auto [kraus, decoder] = instantiate(scheme, params);
    const auto result = run_protocol(h, gs, kraus, decoder);
    const auto c2 = refined_certificate(fit, kraus, decoder, h, b);
    CHECK(result.Delta_E <= c2.C * std::exp(-c2.mu * d) + 1e-9);
    CHECK(result.Delta_E <= *c2.C_tilde * std::exp(-c2.mu * d) + 1e-9);
  }
}
