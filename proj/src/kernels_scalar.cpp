// Scalar reference kernels. These are the semantics the SIMD variants are
// tested against; keep them simple and obviously correct.

#include "kernels_impl.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace qet::kernels::detail {
namespace {

void axpy_scalar(std::size_t n, cxd a, const cxd* x, cxd* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

cxd dot_scalar(std::size_t n, const cxd* x, const cxd* y) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

double norm_sq_scalar(std::size_t n, const cxd* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

void scale_scalar(std::size_t n, cxd a, cxd* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void apply_local_scalar(const cxd* matrix, std::span<const int> sites,
                        int n_qubits, const cxd* x, cxd* y, bool accumulate) {
  const std::size_t k = sites.size();
  const std::size_t m = std::size_t{1} << k;
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  const std::uint64_t smask = support_mask(sites);

  std::vector<std::uint64_t> scatter(m);
  build_scatter(sites, scatter.data(), m);

  if (!accumulate) std::fill(y, y + dim, cxd{0.0, 0.0});

  std::vector<cxd> in(m);
  const std::uint64_t last = (dim - 1) & ~smask;
  std::uint64_t e = 0;
  while (true) {
    for (std::size_t l = 0; l < m; ++l) in[l] = x[e + scatter[l]];
    for (std::size_t l = 0; l < m; ++l) {
      cxd acc{0.0, 0.0};
      // column-major: M(l, lp) = matrix[l + m*lp]
      for (std::size_t lp = 0; lp < m; ++lp) acc += matrix[l + m * lp] * in[lp];
      y[e + scatter[l]] += acc;
    }
    if (e == last) break;
    e = ((e | smask) + 1) & ~smask;
  }
}

cxd expval_local_scalar(const cxd* matrix, std::span<const int> sites,
                        int n_qubits, const cxd* x) {
  const std::size_t k = sites.size();
  const std::size_t m = std::size_t{1} << k;
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  const std::uint64_t smask = support_mask(sites);

  std::vector<std::uint64_t> scatter(m);
  build_scatter(sites, scatter.data(), m);

  std::vector<cxd> in(m);
  double re = 0.0, im = 0.0;
  const std::uint64_t last = (dim - 1) & ~smask;
  std::uint64_t e = 0;
  while (true) {
    for (std::size_t l = 0; l < m; ++l) in[l] = x[e + scatter[l]];
    for (std::size_t l = 0; l < m; ++l) {
      cxd acc{0.0, 0.0};
      for (std::size_t lp = 0; lp < m; ++lp) acc += matrix[l + m * lp] * in[lp];
      const cxd c = std::conj(in[l]) * acc;
      re += c.real();
      im += c.imag();
    }
    if (e == last) break;
    e = ((e | smask) + 1) & ~smask;
  }
  return {re, im};
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{axpy_scalar,  dot_scalar,         norm_sq_scalar,
                             scale_scalar, apply_local_scalar, expval_local_scalar};
  return t;
}

}  // namespace qet::kernels::detail
