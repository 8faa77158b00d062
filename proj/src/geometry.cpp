#include "lrghz/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lrghz/error.hpp"

namespace lrghz {

namespace {

// Advances `digits` as an odometer with the last digit fastest.
// Returns false once every combination has been visited.
bool next_lexicographic(std::vector<int>& digits, int radix) {
  for (int k = static_cast<int>(digits.size()) - 1; k >= 0; --k) {
    if (++digits[k] < radix) return true;
    digits[k] = 0;
  }
  return false;
}

}  // namespace

void LatticeSpec::validate() const {
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "lattice dimension must be >= 1");
  if (r < 1) throw Error(ErrorCode::kInvalidArgument, "lattice side must be >= 1");
  if (q < 2) throw Error(ErrorCode::kInvalidArgument, "levels per site must be >= 2");
  std::size_t n = 1;
  for (int k = 0; k < d; ++k) {
    if (n > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(r)) {
      throw Error(ErrorCode::kInvalidArgument, "lattice has more than 2^64 sites");
    }
    n *= static_cast<std::size_t>(r);
  }
}

std::size_t LatticeSpec::site_count() const {
  std::size_t n = 1;
  for (int k = 0; k < d; ++k) n *= static_cast<std::size_t>(r);
  return n;
}

std::size_t LatticeSpec::flat_index(const Coord& coord) const {
  if (!contains(coord)) throw Error(ErrorCode::kOutOfBounds, "coordinate outside lattice");
  std::size_t flat = 0;
  for (int x : coord) flat = flat * static_cast<std::size_t>(r) + static_cast<std::size_t>(x);
  return flat;
}

Coord LatticeSpec::coord_of(std::size_t flat) const {
  if (flat >= site_count()) throw Error(ErrorCode::kOutOfBounds, "flat index outside lattice");
  Coord coord(static_cast<std::size_t>(d));
  for (int k = d - 1; k >= 0; --k) {
    coord[k] = static_cast<int>(flat % static_cast<std::size_t>(r));
    flat /= static_cast<std::size_t>(r);
  }
  return coord;
}

bool LatticeSpec::contains(const Coord& coord) const {
  if (static_cast<int>(coord.size()) != d) return false;
  return std::all_of(coord.begin(), coord.end(), [this](int x) { return x >= 0 && x < r; });
}

std::size_t Region::site_count() const {
  std::size_t n = 1;
  for (int k = 0; k < dimension(); ++k) n *= static_cast<std::size_t>(side);
  return n;
}

bool Region::contains(const Coord& coord) const {
  if (coord.size() != anchor.size()) return false;
  for (std::size_t k = 0; k < coord.size(); ++k) {
    if (coord[k] < anchor[k] || coord[k] >= anchor[k] + side) return false;
  }
  return true;
}

std::vector<Coord> Region::sites() const {
  std::vector<Coord> out;
  out.reserve(site_count());
  std::vector<int> offset(anchor.size(), 0);
  do {
    Coord c = anchor;
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += offset[k];
    out.push_back(std::move(c));
  } while (next_lexicographic(offset, side));
  return out;
}

Region Region::whole(const LatticeSpec& lattice) {
  return Region{Coord(static_cast<std::size_t>(lattice.d), 0), lattice.r};
}

std::vector<Region> partition(const Region& region, int m) {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "merge factor must be >= 1");
  if (region.side % m != 0) {
    throw Error(ErrorCode::kDivisibility, "side " + std::to_string(region.side) +
                                              " is not divisible by m=" + std::to_string(m));
  }
  const int child_side = region.side / m;
  std::vector<Region> out;
  std::vector<int> block(region.anchor.size(), 0);
  do {
    Region sub{region.anchor, child_side};
    for (std::size_t k = 0; k < block.size(); ++k) sub.anchor[k] += block[k] * child_side;
    out.push_back(std::move(sub));
  } while (next_lexicographic(block, m));
  return out;
}

std::vector<Region> partition(const Region& region, int m, const Coord& info_site) {
  if (!region.contains(info_site)) {
    throw Error(ErrorCode::kOutOfBounds, "information site is not inside the region");
  }
  auto subs = partition(region, m);
  auto it = std::find_if(subs.begin(), subs.end(),
                         [&](const Region& s) { return s.contains(info_site); });
  std::rotate(subs.begin(), it, it + 1);
  return subs;
}

double euclidean_diameter_bound(const Region& region) {
  return region.side * std::sqrt(static_cast<double>(region.dimension()));
}

std::vector<std::size_t> site_mask(const Region& region, const LatticeSpec& lattice) {
  if (region.dimension() != lattice.d) {
    throw Error(ErrorCode::kOutOfBounds, "region dimension does not match lattice");
  }
  for (int k = 0; k < lattice.d; ++k) {
    if (region.anchor[k] < 0 || region.anchor[k] + region.side > lattice.r) {
      throw Error(ErrorCode::kOutOfBounds, "region exceeds lattice bounds");
    }
  }
  std::vector<std::size_t> mask;
  mask.reserve(region.site_count());
  for (const auto& c : region.sites()) mask.push_back(lattice.flat_index(c));
  std::sort(mask.begin(), mask.end());
  return mask;
}

double euclidean_distance(const Coord& a, const Coord& b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

}  // namespace lrghz
