#include "qet/hamiltonian.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "qet/kernels.hpp"

namespace qet {

namespace {

bool is_power_of_two_dim(const MatrixXcd& m, int k) {
  return m.rows() == m.cols() && m.rows() == (Eigen::Index{1} << k);
}

int n_qubits_of(const VectorXcd& x) {
  const auto n = x.size();
  if (n <= 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("state vector length is not a power of two");
  int k = 0;
  while ((Eigen::Index{1} << k) < n) ++k;
  return k;
}

}  // namespace

double operator_norm(const MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

LocalOperator::LocalOperator(Region support_in, MatrixXcd matrix_in)
    : support(std::move(support_in)), matrix(std::move(matrix_in)) {
  if (!is_power_of_two_dim(matrix, support.size()))
    throw std::invalid_argument(
        "local operator dimension does not match its support");
}

LocalTerm::LocalTerm(Region support, MatrixXcd op)
    : support_(std::move(support)), matrix_(std::move(op)) {
  if (!is_power_of_two_dim(matrix_, support_.size()))
    throw std::invalid_argument("term dimension does not match its support");
  const double herm_dev = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > 1e-12)
    throw std::invalid_argument("local term is not Hermitian (deviation " +
                                std::to_string(herm_dev) + ")");
  norm_ = operator_norm(matrix_);
}

Hamiltonian::Hamiltonian(Lattice lattice, std::vector<LocalTerm> terms,
                         double energy_shift)
    : lattice_(lattice), terms_(std::move(terms)), energy_shift_(energy_shift) {
  for (const auto& t : terms_) {
    t.support().validate_within(lattice_);
    j_ = std::max(j_, t.norm());
    range_r_ = std::max(range_r_, t.support().diameter());
  }
}

Hamiltonian Hamiltonian::with_shift(double shift) const {
  Hamiltonian h = *this;
  h.energy_shift_ = shift;
  return h;
}

void Hamiltonian::apply(const VectorXcd& x, VectorXcd& y) const {
  const auto dim = static_cast<Eigen::Index>(lattice_.hilbert_dimension());
  if (x.size() != dim)
    throw std::invalid_argument("state dimension mismatch in apply");
  y.resize(dim);
  if (energy_shift_ != 0.0)
    y = energy_shift_ * x;
  else
    y.setZero();
  for (const auto& t : terms_)
    kernels::apply_local(t.matrix().data(), t.support().sites(),
                         lattice_.n_sites(), x.data(), y.data(), true);
}

double Hamiltonian::expectation(const VectorXcd& x) const {
  const auto dim = static_cast<Eigen::Index>(lattice_.hilbert_dimension());
  if (x.size() != dim)
    throw std::invalid_argument("state dimension mismatch in expectation");
  double val = 0.0;
  for (const auto& t : terms_)
    val += kernels::expval_local(t.matrix().data(), t.support().sites(),
                                 lattice_.n_sites(), x.data())
               .real();
  if (energy_shift_ != 0.0)
    val += energy_shift_ * kernels::norm_sq(dim, x.data());
  return val;
}

MatrixXcd Hamiltonian::dense() const {
  const std::size_t dim = lattice_.hilbert_dimension();
  if (dim > kDenseBuildLimit)
    throw std::invalid_argument("dense Hamiltonian build refused at dimension " +
                                std::to_string(dim));
  MatrixXcd h = MatrixXcd::Zero(dim, dim);
  for (const auto& t : terms_)
    h += embed_dense(t.as_operator(), lattice_.n_sites());
  h += energy_shift_ * MatrixXcd::Identity(dim, dim);
  return h;
}

std::vector<LocalTerm> boundary_terms(const Hamiltonian& h, const Region& b) {
  b.validate_within(h.lattice());
  std::vector<LocalTerm> out;
  for (const auto& t : h.terms())
    if (t.support().intersects(b)) out.push_back(t);
  std::stable_sort(out.begin(), out.end(),
                   [](const LocalTerm& x, const LocalTerm& y) {
                     if (x.support().min_site() != y.support().min_site())
                       return x.support().min_site() < y.support().min_site();
                     return x.support().diameter() < y.support().diameter();
                   });
  return out;
}

double boundary_sum(const Hamiltonian& h, const Region& b) {
  double s = 0.0;
  for (const auto& t : boundary_terms(h, b)) s += t.norm();
  return s;
}

VectorXcd apply_local_operator(const LocalOperator& op, const VectorXcd& x) {
  const int n = n_qubits_of(x);
  if (op.support.max_site() >= n)
    throw std::invalid_argument("operator support outside state space");
  VectorXcd y(x.size());
  kernels::apply_local(op.matrix.data(), op.support.sites(), n, x.data(),
                       y.data(), false);
  return y;
}

std::complex<double> local_expectation(const LocalOperator& op,
                                       const VectorXcd& x) {
  const int n = n_qubits_of(x);
  if (op.support.max_site() >= n)
    throw std::invalid_argument("operator support outside state space");
  return kernels::expval_local(op.matrix.data(), op.support.sites(), n,
                               x.data());
}

MatrixXcd embed_dense(const LocalOperator& op, int n_sites) {
  if (op.support.max_site() >= n_sites)
    throw std::invalid_argument("operator support outside lattice");
  if (n_sites > 14)
    throw std::invalid_argument("dense embedding refused above 14 sites");
  const std::size_t dim = std::size_t{1} << n_sites;
  const std::size_t m = std::size_t{1} << op.support.size();

  std::uint64_t smask = 0;
  for (int s : op.support.sites()) smask |= std::uint64_t{1} << s;
  std::vector<std::uint64_t> scatter(m);
  for (std::size_t l = 0; l < m; ++l) {
    std::uint64_t p = 0;
    for (int t = 0; t < op.support.size(); ++t)
      if ((l >> t) & 1) p |= std::uint64_t{1} << op.support.sites()[t];
    scatter[l] = p;
  }

  MatrixXcd out = MatrixXcd::Zero(dim, dim);
  const std::uint64_t last = (dim - 1) & ~smask;
  std::uint64_t e = 0;
  while (true) {
    for (std::size_t l = 0; l < m; ++l)
      for (std::size_t lp = 0; lp < m; ++lp)
        out(e + scatter[l], e + scatter[lp]) = op.matrix(l, lp);
    if (e == last) break;
    e = ((e | smask) + 1) & ~smask;
  }
  return out;
}

Region region_union(const Region& a, const Region& b) {
  std::vector<int> u = a.sites();
  u.insert(u.end(), b.sites().begin(), b.sites().end());
  return Region(std::move(u));
}

MatrixXcd embed_into(const LocalOperator& op, const Region& target) {
  std::vector<int> mapped;
  mapped.reserve(op.support.size());
  const auto& ts = target.sites();
  for (int s : op.support.sites()) {
    const auto it = std::lower_bound(ts.begin(), ts.end(), s);
    if (it == ts.end() || *it != s)
      throw std::invalid_argument("operator support not inside target region");
    mapped.push_back(static_cast<int>(it - ts.begin()));
  }
  return embed_dense(LocalOperator{Region(std::move(mapped)), op.matrix},
                     target.size());
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace qet
