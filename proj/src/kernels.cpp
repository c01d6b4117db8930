// Backend selection and the public kernel entry points.

#include "kernels_impl.hpp"

#include <atomic>
#include <stdexcept>

namespace qet::kernels {

namespace detail {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable* pick_default() {
  if (cpu_has_avx2()) {
    if (const KernelTable* t = avx2_table()) return t;
  }
  return &scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};
std::atomic<Backend> g_active_backend{Backend::scalar};

const KernelTable* active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t) return t;
  t = pick_default();
  g_active.store(t, std::memory_order_release);
  g_active_backend.store(t == &scalar_table() ? Backend::scalar : Backend::avx2,
                         std::memory_order_release);
  return t;
}

}  // namespace
}  // namespace detail

Backend active_backend() {
  detail::active();
  return detail::g_active_backend.load(std::memory_order_acquire);
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return detail::cpu_has_avx2() && detail::avx2_table() != nullptr;
  }
  return false;
}

std::string backend_name(Backend b) {
  return b == Backend::scalar ? "scalar" : "avx2";
}

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument("kernel backend not available on this CPU: " +
                                backend_name(b));
  detail::g_active.store(b == Backend::scalar ? &detail::scalar_table()
                                              : detail::avx2_table(),
                         std::memory_order_release);
  detail::g_active_backend.store(b, std::memory_order_release);
}

void axpy(std::size_t n, cxd a, const cxd* x, cxd* y) {
  detail::active()->axpy(n, a, x, y);
}

cxd dot(std::size_t n, const cxd* x, const cxd* y) {
  return detail::active()->dot(n, x, y);
}

double norm_sq(std::size_t n, const cxd* x) {
  return detail::active()->norm_sq(n, x);
}

void scale(std::size_t n, cxd a, cxd* x) { detail::active()->scale(n, a, x); }

void apply_local(const cxd* matrix, std::span<const int> sites, int n_qubits,
                 const cxd* x, cxd* y, bool accumulate) {
  if (sites.empty()) throw std::invalid_argument("apply_local: empty support");
  detail::active()->apply_local(matrix, sites, n_qubits, x, y, accumulate);
}

cxd expval_local(const cxd* matrix, std::span<const int> sites, int n_qubits,
                 const cxd* x) {
  if (sites.empty()) throw std::invalid_argument("expval_local: empty support");
  return detail::active()->expval_local(matrix, sites, n_qubits, x);
}

}  // namespace qet::kernels
