#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace qet {

// One-dimensional open chain of spin-1/2 sites. Sites are 0..n-1 and the
// metric is the path-graph distance |i - j|.
class Lattice {
 public:
  explicit Lattice(int n_sites, int local_dimension = 2);

  int n_sites() const { return n_sites_; }
  int local_dimension() const { return local_dim_; }
  std::size_t hilbert_dimension() const { return std::size_t{1} << n_sites_; }

  int distance(int i, int j) const;  // throws on out-of-range sites

 private:
  int n_sites_;
  int local_dim_;
};

// Nonempty set of lattice sites, stored sorted and deduplicated.
class Region {
 public:
  Region(std::initializer_list<int> sites);
  explicit Region(std::vector<int> sites);

  const std::vector<int>& sites() const { return sites_; }
  int size() const { return static_cast<int>(sites_.size()); }
  int min_site() const { return sites_.front(); }
  int max_site() const { return sites_.back(); }
  bool contains(int site) const;
  bool intersects(const Region& other) const;
  int diameter() const { return max_site() - min_site(); }

  void validate_within(const Lattice& lat) const;  // throws if out of bounds

 private:
  std::vector<int> sites_;
};

// min over (i in a, j in b) of the lattice metric; 0 iff the regions
// intersect.
int region_distance(const Lattice& lat, const Region& a, const Region& b);

}  // namespace qet
