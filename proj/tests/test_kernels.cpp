#include <doctest.h>

#include <random>

#include "qet/kernels.hpp"
#include "support/test_helpers.hpp"

using namespace qet;
using qet::kernels::Backend;
using qet::testing::embed_by_bits;
using cxd = std::complex<double>;

namespace {

struct BackendGuard {
  Backend saved;
  BackendGuard() : saved(kernels::active_backend()) {}
  ~BackendGuard() { kernels::set_backend(saved); }
};

std::vector<cxd> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::vector<cxd> v(n);
  for (auto& x : v) x = {gauss(rng), gauss(rng)};
  return v;
}

}  // namespace

TEST_CASE("apply_local matches the dense embedding oracle") {
  std::mt19937_64 rng(11);
  const std::vector<std::vector<int>> supports = {
      {0}, {3}, {0, 1}, {1, 4}, {0, 2, 5}, {2, 3, 4}, {1, 2, 4, 5}};
  const int n = 6;
  const std::size_t dim = 1u << n;

  for (const auto& sites : supports) {
    const MatrixXcd op =
        qet::testing::random_matrix(1 << sites.size(), rng);
    const MatrixXcd full = embed_by_bits(op, sites, n);

    VectorXcd x(dim);
    std::normal_distribution<double> gauss;
    for (auto& v : x) v = cxd{gauss(rng), gauss(rng)};
    const VectorXcd expect = full * x;

    VectorXcd y(dim);
    kernels::apply_local(op.data(), sites, n, x.data(), y.data(), false);
    CHECK((y - expect).cwiseAbs().maxCoeff() < 1e-12);

    // accumulate mode adds on top
    VectorXcd y2 = x;
    kernels::apply_local(op.data(), sites, n, x.data(), y2.data(), true);
    CHECK((y2 - (x + expect)).cwiseAbs().maxCoeff() < 1e-12);

    const cxd ev = kernels::expval_local(op.data(), sites, n, x.data());
    const cxd ev_expect = (x.adjoint() * full * x)(0);
    CHECK(std::abs(ev - ev_expect) < 1e-10);
  }
}

TEST_CASE("scalar and avx2 backends agree") {
  if (!kernels::backend_available(Backend::avx2)) {
    MESSAGE("avx2 not available; equivalence test skipped");
    return;
  }
  BackendGuard guard;
  std::mt19937_64 rng(22);

  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 7);  // 3..9 qubits
    const std::size_t dim = std::size_t{1} << n;
    const int k = 1 + static_cast<int>(rng() % 3);
    std::vector<int> sites;
    while (static_cast<int>(sites.size()) < k) {
      const int s = static_cast<int>(rng() % n);
      if (std::find(sites.begin(), sites.end(), s) == sites.end())
        sites.push_back(s);
    }
    std::sort(sites.begin(), sites.end());

    const MatrixXcd op = qet::testing::random_matrix(1 << k, rng);
    const auto x = random_vec(dim, rng);
    const auto y0 = random_vec(dim, rng);

    std::vector<cxd> y_scalar = y0, y_avx = y0;
    kernels::set_backend(Backend::scalar);
    kernels::apply_local(op.data(), sites, n, x.data(), y_scalar.data(), true);
    const cxd dot_s = kernels::dot(dim, x.data(), y_scalar.data());
    const double nrm_s = kernels::norm_sq(dim, x.data());
    const cxd ev_s = kernels::expval_local(op.data(), sites, n, x.data());

    kernels::set_backend(Backend::avx2);
    kernels::apply_local(op.data(), sites, n, x.data(), y_avx.data(), true);
    const cxd dot_a = kernels::dot(dim, x.data(), y_avx.data());
    const double nrm_a = kernels::norm_sq(dim, x.data());
    const cxd ev_a = kernels::expval_local(op.data(), sites, n, x.data());

    double max_dev = 0;
    for (std::size_t i = 0; i < dim; ++i)
      max_dev = std::max(max_dev, std::abs(y_scalar[i] - y_avx[i]));
    CHECK(max_dev < 1e-11);
    CHECK(std::abs(dot_s - dot_a) < 1e-9);
    CHECK(std::abs(nrm_s - nrm_a) < 1e-9);
    CHECK(std::abs(ev_s - ev_a) < 1e-9);
  }
}

TEST_CASE("axpy and scale backends agree") {
  if (!kernels::backend_available(Backend::avx2)) return;
  BackendGuard guard;
  std::mt19937_64 rng(33);
  for (std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t{64},
                        std::size_t{1001}}) {
    const auto x = random_vec(n, rng);
    auto ys = random_vec(n, rng);
    auto ya = ys;
    const cxd a{0.3, -1.7};

    kernels::set_backend(Backend::scalar);
    kernels::axpy(n, a, x.data(), ys.data());
    auto ss = x;
    kernels::scale(n, a, ss.data());

    kernels::set_backend(Backend::avx2);
    kernels::axpy(n, a, x.data(), ya.data());
    auto sa = x;
    kernels::scale(n, a, sa.data());

    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(ys[i] - ya[i]) < 1e-12);
      CHECK(std::abs(ss[i] - sa[i]) < 1e-12);
    }
  }
}

TEST_CASE("identity application is a no-op") {
  std::mt19937_64 rng(44);
  const int n = 5;
  const std::size_t dim = 1u << n;
  const auto x = random_vec(dim, rng);
  const MatrixXcd id = MatrixXcd::Identity(4, 4);
  std::vector<int> sites{1, 3};
  std::vector<cxd> y(dim);
  kernels::apply_local(id.data(), sites, n, x.data(), y.data(), false);
  for (std::size_t i = 0; i < dim; ++i) CHECK(std::abs(y[i] - x[i]) < 1e-15);
}

TEST_CASE("empty support is rejected") {
  std::vector<int> sites;
  const MatrixXcd id = MatrixXcd::Identity(1, 1);
  cxd x{1, 0}, y{0, 0};
  CHECK_THROWS_AS(kernels::apply_local(id.data(), sites, 0, &x, &y, false),
                  std::invalid_argument);
}
