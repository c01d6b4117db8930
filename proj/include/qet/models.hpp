#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qet/hamiltonian.hpp"

namespace qet {

// Catalog entry for a chain model. Supported names:
//   "tfim"       - open transverse-field Ising chain,
//                  H = -coupling * sum Z_i Z_{i+1} - g * sum X_i
//   "field_only" - product control model, H = g * sum (1 - X_i)/2
//   "custom"     - caller-supplied term list
struct ModelSpec {
  std::string name = "tfim";
  double g = 1.0;
  double coupling = 1.0;
  std::vector<LocalTerm> custom_terms;
  std::optional<int> declared_range;  // custom models may pin the range
};

Hamiltonian build_chain(int n_sites, const ModelSpec& spec);

Hamiltonian build_tfim_chain(int n_sites, double g, double coupling = 1.0);
Hamiltonian build_field_chain(int n_sites, double g = 1.0);

const MatrixXcd& pauli_x();
const MatrixXcd& pauli_y();
const MatrixXcd& pauli_z();
const MatrixXcd& identity2();

}  // namespace qet
