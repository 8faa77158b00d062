#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace lrghz {

using Coord = std::vector<int>;

// d-dimensional hypercubic lattice of side r with a q-level system per site.
// Lattice spacing is 1. Sites are flattened row-major over coordinates
// (the last coordinate varies fastest).
struct LatticeSpec {
  int d = 1;
  int r = 1;
  int q = 2;

  // Throws kInvalidArgument unless d >= 1, r >= 1, q >= 2.
  void validate() const;

  std::size_t site_count() const;
  std::size_t flat_index(const Coord& coord) const;
  Coord coord_of(std::size_t flat) const;
  bool contains(const Coord& coord) const;
};

// Axis-aligned subcube given by its lowest corner and side length.
struct Region {
  Coord anchor;
  int side = 1;

  int dimension() const { return static_cast<int>(anchor.size()); }
  std::size_t site_count() const;
  bool contains(const Coord& coord) const;

  // Sites in lexicographic coordinate order.
  std::vector<Coord> sites() const;

  static Region whole(const LatticeSpec& lattice);

  friend bool operator==(const Region&, const Region&) = default;
};

// Splits `region` into m^d subcubes of side side/m ordered lexicographically
// by anchor. Throws kDivisibility when m does not divide the side.
std::vector<Region> partition(const Region& region, int m);

// Same partition, with the subcube containing `info_site` moved to index 0
// (the remaining subcubes keep their lexicographic order).
std::vector<Region> partition(const Region& region, int m, const Coord& info_site);

// side * sqrt(d): the diameter bound used to normalize the merge coupling.
double euclidean_diameter_bound(const Region& region);

// Sorted flat indices of the region's sites. Throws kOutOfBounds when the
// region does not fit in the lattice.
std::vector<std::size_t> site_mask(const Region& region, const LatticeSpec& lattice);

double euclidean_distance(const Coord& a, const Coord& b);

}  // namespace lrghz
