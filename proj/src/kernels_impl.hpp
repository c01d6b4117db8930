#pragma once

// Internal backend tables shared by the dispatcher and the per-ISA
// translation units.

#include "qet/kernels.hpp"

#include <cstdint>

namespace qet::kernels::detail {

struct KernelTable {
  void (*axpy)(std::size_t, cxd, const cxd*, cxd*);
  cxd (*dot)(std::size_t, const cxd*, const cxd*);
  double (*norm_sq)(std::size_t, const cxd*);
  void (*scale)(std::size_t, cxd, cxd*);
  void (*apply_local)(const cxd*, std::span<const int>, int, const cxd*, cxd*,
                      bool);
  cxd (*expval_local)(const cxd*, std::span<const int>, int, const cxd*);
};

const KernelTable& scalar_table();

// Null when this build or CPU cannot run AVX2 code.
const KernelTable* avx2_table();
bool cpu_has_avx2();

// Support-mask helpers shared by both backends. Local index bit t maps to
// sites[t]; `scatter[l]` is the global offset of local basis state l.
inline std::uint64_t support_mask(std::span<const int> sites) {
  std::uint64_t m = 0;
  for (int s : sites) m |= std::uint64_t{1} << s;
  return m;
}

inline void build_scatter(std::span<const int> sites, std::uint64_t* scatter,
                          std::size_t m) {
  for (std::size_t l = 0; l < m; ++l) {
    std::uint64_t p = 0;
    for (std::size_t t = 0; t < sites.size(); ++t)
      if ((l >> t) & 1) p |= std::uint64_t{1} << sites[t];
    scatter[l] = p;
  }
}

}  // namespace qet::kernels::detail
