#pragma once

// Complex state-vector kernels: scalar reference implementations plus AVX2
// variants selected once at startup. All inner-loop arithmetic on full
// Hilbert-space vectors (operator application, Lanczos vector algebra,
// expectation values) goes through this interface, so the two backends can
// be equivalence-tested against each other.

#include <complex>
#include <cstddef>
#include <span>
#include <string>

namespace qet::kernels {

using cxd = std::complex<double>;

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_available(Backend b);
std::string backend_name(Backend b);

// Force a backend (tests, benchmarks). Throws std::invalid_argument if the
// backend is not available on this CPU.
void set_backend(Backend b);

// y += a*x over n entries.
void axpy(std::size_t n, cxd a, const cxd* x, cxd* y);

// sum_i conj(x_i) * y_i
cxd dot(std::size_t n, const cxd* x, const cxd* y);

// sum_i |x_i|^2
double norm_sq(std::size_t n, const cxd* x);

// x *= a
void scale(std::size_t n, cxd a, cxd* x);

// Embedded local-operator application,  y (+)= (M ⊗ I) x.
//
// M is a dense 2^k x 2^k column-major matrix acting on `sites` (strictly
// ascending). Conventions, fixed globally: bit i of a global basis index is
// site i; bit t of a local basis index is sites[t]. x and y have length
// 2^n_qubits and must not alias.
void apply_local(const cxd* matrix, std::span<const int> sites, int n_qubits,
                 const cxd* x, cxd* y, bool accumulate);

// Fused <x| (M ⊗ I) |x>, same conventions.
cxd expval_local(const cxd* matrix, std::span<const int> sites, int n_qubits,
                 const cxd* x);

}  // namespace qet::kernels
