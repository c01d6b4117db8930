#include "qet/models.hpp"

#include <stdexcept>
#include <string>

namespace qet {

namespace {

MatrixXcd make2(std::complex<double> a, std::complex<double> b,
                std::complex<double> c, std::complex<double> d) {
  MatrixXcd m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

const MatrixXcd& pauli_x() {
  static const MatrixXcd m = make2(0, 1, 1, 0);
  return m;
}

const MatrixXcd& pauli_y() {
  static const MatrixXcd m =
      make2(0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0);
  return m;
}

const MatrixXcd& pauli_z() {
  static const MatrixXcd m = make2(1, 0, 0, -1);
  return m;
}

const MatrixXcd& identity2() {
  static const MatrixXcd m = MatrixXcd::Identity(2, 2);
  return m;
}

Hamiltonian build_tfim_chain(int n_sites, double g, double coupling) {
  if (n_sites < 2)
    throw std::invalid_argument("tfim chain needs at least 2 sites");
  Lattice lat(n_sites);
  std::vector<LocalTerm> terms;
  terms.reserve(2 * n_sites - 1);
  // Local basis convention: bit 0 of the two-site index is the lower site,
  // so the pair matrix is kron(op_high, op_low).
  const MatrixXcd zz = -coupling * kron(pauli_z(), pauli_z());
  for (int i = 0; i + 1 < n_sites; ++i)
    terms.emplace_back(Region{i, i + 1}, zz);
  const MatrixXcd field = -g * pauli_x();
  for (int i = 0; i < n_sites; ++i) terms.emplace_back(Region{i}, field);
  return Hamiltonian(lat, std::move(terms));
}

Hamiltonian build_field_chain(int n_sites, double g) {
  if (n_sites < 2)
    throw std::invalid_argument("field_only chain needs at least 2 sites");
  Lattice lat(n_sites);
  std::vector<LocalTerm> terms;
  terms.reserve(n_sites);
  // g * (1 - X)/2 per site: the ground state is the product |+...+> with
  // energy exactly zero.
  const MatrixXcd h = 0.5 * g * (identity2() - pauli_x());
  for (int i = 0; i < n_sites; ++i) terms.emplace_back(Region{i}, h);
  return Hamiltonian(lat, std::move(terms));
}

Hamiltonian build_chain(int n_sites, const ModelSpec& spec) {
  if (spec.name == "tfim") return build_tfim_chain(n_sites, spec.g, spec.coupling);
  if (spec.name == "field_only") return build_field_chain(n_sites, spec.g);
  if (spec.name == "custom") {
    if (n_sites < 2)
      throw std::invalid_argument("custom chain needs at least 2 sites");
    if (spec.custom_terms.empty())
      throw std::invalid_argument("custom model has no terms");
    Lattice lat(n_sites);
    if (spec.declared_range) {
      for (const auto& t : spec.custom_terms)
        if (t.support().diameter() > *spec.declared_range)
          throw std::invalid_argument(
              "term diameter " + std::to_string(t.support().diameter()) +
              " exceeds declared range " + std::to_string(*spec.declared_range));
    }
    return Hamiltonian(lat, spec.custom_terms);
  }
  throw std::invalid_argument("unknown model name: " + spec.name);
}

}  // namespace qet
