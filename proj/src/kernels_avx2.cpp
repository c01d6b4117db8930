// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma; only reached after
// the dispatcher has confirmed CPU support, so no illegal-instruction risk.
//
// Complex layout: a __m256d holds two complex doubles (re0, im0, re1, im1).

#include "kernels_impl.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

namespace qet::kernels::detail {
namespace {

inline __m256d swap_re_im(__m256d z) { return _mm256_permute_pd(z, 0x5); }

// z * w for two complex lanes, w = (wr, wi) broadcast.
inline __m256d cmul(__m256d z, __m256d wr, __m256d wi) {
  return _mm256_fmaddsub_pd(z, wr, _mm256_mul_pd(swap_re_im(z), wi));
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

const __m256d kNegEven = _mm256_setr_pd(-1.0, 1.0, -1.0, 1.0);

void axpy_avx2(std::size_t n, cxd a, const cxd* x, cxd* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    __m256d yv = _mm256_loadu_pd(reinterpret_cast<double*>(y + i));
    yv = _mm256_add_pd(yv, cmul(xv, ar, ai));
    _mm256_storeu_pd(reinterpret_cast<double*>(y + i), yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

cxd dot_avx2(std::size_t n, const cxd* x, const cxd* y) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    const __m256d yv = _mm256_loadu_pd(reinterpret_cast<const double*>(y + i));
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    const __m256d xs = _mm256_mul_pd(swap_re_im(xv), kNegEven);
    acc_im = _mm256_fmadd_pd(xs, yv, acc_im);
  }
  double re = hsum(acc_re), im = hsum(acc_im);
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

double norm_sq_avx2(std::size_t n, const cxd* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    acc = _mm256_fmadd_pd(xv, xv, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i)
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

void scale_avx2(std::size_t n, cxd a, cxd* x) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(reinterpret_cast<double*>(x + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(x + i), cmul(xv, ar, ai));
  }
  for (; i < n; ++i) x[i] *= a;
}

// Supports up to 4 sites in the vector path; the support must not contain
// site 0, so environments come in contiguous runs of length 2^sites[0] >= 2.
constexpr std::size_t kMaxVectorSupport = 4;

void apply_local_avx2(const cxd* matrix, std::span<const int> sites,
                      int n_qubits, const cxd* x, cxd* y, bool accumulate) {
  const std::size_t k = sites.size();
  if (k == 0 || k > kMaxVectorSupport || sites[0] == 0) {
    scalar_table().apply_local(matrix, sites, n_qubits, x, y, accumulate);
    return;
  }
  const std::size_t m = std::size_t{1} << k;
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  const std::uint64_t smask = support_mask(sites);
  const std::uint64_t run_len = std::uint64_t{1} << sites[0];
  const std::uint64_t run_mask = smask | (run_len - 1);

  std::uint64_t scatter[std::size_t{1} << kMaxVectorSupport];
  build_scatter(sites, scatter, m);

  // Broadcast matrix entries once; column-major M(l, lp) = matrix[l + m*lp].
  constexpr std::size_t kMaxM = std::size_t{1} << kMaxVectorSupport;
  __m256d mr[kMaxM * kMaxM], mi[kMaxM * kMaxM];
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t lp = 0; lp < m; ++lp) {
      mr[l * m + lp] = _mm256_set1_pd(matrix[l + m * lp].real());
      mi[l * m + lp] = _mm256_set1_pd(matrix[l + m * lp].imag());
    }

  const std::uint64_t last_run = (dim - 1) & ~run_mask;
  std::uint64_t run = 0;
  __m256d in[kMaxM];
  while (true) {
    for (std::uint64_t i = 0; i < run_len; i += 2) {
      const std::uint64_t base = run + i;
      for (std::size_t lp = 0; lp < m; ++lp)
        in[lp] = _mm256_loadu_pd(
            reinterpret_cast<const double*>(x + base + scatter[lp]));
      for (std::size_t l = 0; l < m; ++l) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t lp = 0; lp < m; ++lp)
          acc = _mm256_add_pd(acc, cmul(in[lp], mr[l * m + lp], mi[l * m + lp]));
        double* yp = reinterpret_cast<double*>(y + base + scatter[l]);
        if (accumulate) acc = _mm256_add_pd(acc, _mm256_loadu_pd(yp));
        _mm256_storeu_pd(yp, acc);
      }
    }
    if (run == last_run) break;
    run = ((run | run_mask) + 1) & ~run_mask;
  }
}

cxd expval_local_avx2(const cxd* matrix, std::span<const int> sites,
                      int n_qubits, const cxd* x) {
  const std::size_t k = sites.size();
  if (k == 0 || k > kMaxVectorSupport || sites[0] == 0)
    return scalar_table().expval_local(matrix, sites, n_qubits, x);

  const std::size_t m = std::size_t{1} << k;
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  const std::uint64_t smask = support_mask(sites);
  const std::uint64_t run_len = std::uint64_t{1} << sites[0];
  const std::uint64_t run_mask = smask | (run_len - 1);

  std::uint64_t scatter[std::size_t{1} << kMaxVectorSupport];
  build_scatter(sites, scatter, m);

  constexpr std::size_t kMaxM = std::size_t{1} << kMaxVectorSupport;
  __m256d mr[kMaxM * kMaxM], mi[kMaxM * kMaxM];
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t lp = 0; lp < m; ++lp) {
      mr[l * m + lp] = _mm256_set1_pd(matrix[l + m * lp].real());
      mi[l * m + lp] = _mm256_set1_pd(matrix[l + m * lp].imag());
    }

  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  const std::uint64_t last_run = (dim - 1) & ~run_mask;
  std::uint64_t run = 0;
  __m256d in[kMaxM];
  while (true) {
    for (std::uint64_t i = 0; i < run_len; i += 2) {
      const std::uint64_t base = run + i;
      for (std::size_t lp = 0; lp < m; ++lp)
        in[lp] = _mm256_loadu_pd(
            reinterpret_cast<const double*>(x + base + scatter[lp]));
      for (std::size_t l = 0; l < m; ++l) {
        __m256d row = _mm256_setzero_pd();
        for (std::size_t lp = 0; lp < m; ++lp)
          row = _mm256_add_pd(row, cmul(in[lp], mr[l * m + lp], mi[l * m + lp]));
        // conj(in[l]) * row, accumulated lanewise.
        acc_re = _mm256_fmadd_pd(in[l], row, acc_re);
        const __m256d xs = _mm256_mul_pd(swap_re_im(in[l]), kNegEven);
        acc_im = _mm256_fmadd_pd(xs, row, acc_im);
      }
    }
    if (run == last_run) break;
    run = ((run | run_mask) + 1) & ~run_mask;
  }
  return {hsum(acc_re), hsum(acc_im)};
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable t{axpy_avx2,  dot_avx2,         norm_sq_avx2,
                             scale_avx2, apply_local_avx2, expval_local_avx2};
  return &t;
}

}  // namespace qet::kernels::detail

#else  // non-x86: no AVX2 variant in this build

namespace qet::kernels::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace qet::kernels::detail

#endif
