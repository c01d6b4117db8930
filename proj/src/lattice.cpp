#include "qet/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace qet {

Lattice::Lattice(int n_sites, int local_dimension)
    : n_sites_(n_sites), local_dim_(local_dimension) {
  if (n_sites < 1) throw std::invalid_argument("lattice needs at least 1 site");
  if (n_sites > 40)
    throw std::invalid_argument("lattice size exceeds addressable limit");
  if (local_dimension != 2)
    throw std::invalid_argument("only spin-1/2 chains are supported");
}

int Lattice::distance(int i, int j) const {
  if (i < 0 || i >= n_sites_ || j < 0 || j >= n_sites_)
    throw std::invalid_argument("site index out of range: " +
                                std::to_string(i < 0 || i >= n_sites_ ? i : j));
  return std::abs(i - j);
}

Region::Region(std::initializer_list<int> sites)
    : Region(std::vector<int>(sites)) {}

Region::Region(std::vector<int> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  if (sites_.empty()) throw std::invalid_argument("region must be nonempty");
  if (sites_.front() < 0)
    throw std::invalid_argument("region contains a negative site index");
}

bool Region::contains(int site) const {
  return std::binary_search(sites_.begin(), sites_.end(), site);
}

bool Region::intersects(const Region& other) const {
  for (int s : sites_)
    if (other.contains(s)) return true;
  return false;
}

void Region::validate_within(const Lattice& lat) const {
  if (max_site() >= lat.n_sites())
    throw std::invalid_argument("region site " + std::to_string(max_site()) +
                                " outside lattice of " +
                                std::to_string(lat.n_sites()) + " sites");
}

int region_distance(const Lattice& lat, const Region& a, const Region& b) {
  a.validate_within(lat);
  b.validate_within(lat);
  int best = lat.distance(a.sites().front(), b.sites().front());
  for (int i : a.sites())
    for (int j : b.sites()) best = std::min(best, lat.distance(i, j));
  return best;
}

}  // namespace qet
