#pragma once

// Shared test utilities: independent dense oracles and seeded random
// generators for states, measurements and decoders.

#include <complex>
#include <random>
#include <vector>

#include "qet/models.hpp"
#include "qet/protocol.hpp"

namespace qet::testing {

using cxd = std::complex<double>;

// Independent dense embedding: walks every (row, col) pair and matches the
// non-support bits directly. Deliberately not the environment-iteration
// scheme used by the library.
inline MatrixXcd embed_by_bits(const MatrixXcd& op,
                               const std::vector<int>& sites, int n) {
  const std::size_t dim = std::size_t{1} << n;
  std::uint64_t smask = 0;
  for (int s : sites) smask |= std::uint64_t{1} << s;
  auto local_index = [&](std::uint64_t global) {
    std::uint64_t l = 0;
    for (std::size_t t = 0; t < sites.size(); ++t)
      if ((global >> sites[t]) & 1) l |= std::uint64_t{1} << t;
    return l;
  };
  MatrixXcd out = MatrixXcd::Zero(dim, dim);
  for (std::uint64_t row = 0; row < dim; ++row)
    for (std::uint64_t col = 0; col < dim; ++col) {
      if ((row & ~smask) != (col & ~smask)) continue;
      out(row, col) = op(local_index(row), local_index(col));
    }
  return out;
}

inline VectorXcd random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  VectorXcd psi(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < psi.size(); ++i)
    psi[i] = cxd{gauss(rng), gauss(rng)};
  psi.normalize();
  return psi;
}

inline MatrixXcd random_matrix(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  MatrixXcd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = cxd{gauss(rng), gauss(rng)};
  return m;
}

inline MatrixXcd random_hermitian(int dim, std::mt19937_64& rng) {
  const MatrixXcd m = random_matrix(dim, rng);
  return 0.5 * (m + m.adjoint());
}

inline MatrixXcd random_unitary(int dim, std::mt19937_64& rng) {
  const MatrixXcd m = random_matrix(dim, rng);
  const Eigen::HouseholderQR<MatrixXcd> qr(m);
  MatrixXcd q = qr.householderQ();
  // fix phases so the distribution is Haar
  const MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    const cxd d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

// Random complete Kraus set: vertical blocks of a Haar random isometry from
// C^dim to C^(outcomes*dim), so completeness holds by construction.
inline KrausSet random_kraus(const Region& region_a, int outcomes,
                             std::mt19937_64& rng) {
  const int dim = 1 << region_a.size();
  const MatrixXcd u = random_unitary(outcomes * dim, rng);
  KrausSet k{region_a, {}, 0.0};
  for (int a = 0; a < outcomes; ++a)
    k.elements.push_back(u.block(a * dim, 0, dim, dim));
  validate_kraus(k);
  return k;
}

// Random decoder with Hermitian generators of spectral scale ~1.
inline Decoder random_decoder(const Region& region_b, int outcomes,
                              std::mt19937_64& rng) {
  const int dim = 1 << region_b.size();
  std::vector<MatrixXcd> gens;
  gens.reserve(outcomes);
  for (int a = 0; a < outcomes; ++a) gens.push_back(random_hermitian(dim, rng));
  return decoder_from_generators(region_b, std::move(gens));
}

}  // namespace qet::testing
