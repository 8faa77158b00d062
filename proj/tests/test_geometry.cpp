#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <set>

#include "lrghz/error.hpp"
#include "lrghz/geometry.hpp"

using namespace lrghz;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an lrghz::Error";
  return ErrorCode::kIo;
}

}  // namespace

TEST(Partition, OneDimensionalHalves) {
  const auto parts = partition(Region{{0}, 4}, 2);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0], (Region{{0}, 2}));
  EXPECT_EQ(parts[1], (Region{{2}, 2}));
}

TEST(Partition, TwoDimensionalQuarters) {
  const auto parts = partition(Region{{0, 0}, 4}, 2);
  ASSERT_EQ(parts.size(), 4u);
  EXPECT_EQ(parts[0].anchor, (Coord{0, 0}));
  EXPECT_EQ(parts[1].anchor, (Coord{0, 2}));
  EXPECT_EQ(parts[2].anchor, (Coord{2, 0}));
  EXPECT_EQ(parts[3].anchor, (Coord{2, 2}));
  for (const auto& p : parts) EXPECT_EQ(p.side, 2);
}

TEST(Partition, NonDivisibleSideIsRejected) {
  EXPECT_EQ(code_of([] { partition(Region{{0}, 6}, 4); }), ErrorCode::kDivisibility);
}

TEST(Partition, InfoSiteSubcubeComesFirst) {
  const auto parts = partition(Region{{0, 0}, 4}, 2, Coord{3, 1});
  EXPECT_EQ(parts[0].anchor, (Coord{2, 0}));
  std::set<Coord> anchors;
  for (const auto& p : parts) anchors.insert(p.anchor);
  EXPECT_EQ(anchors.size(), 4u);
}

// Every (side <= 16, d <= 3, m | side) partition covers its parent exactly once.
TEST(Partition, ExhaustiveDisjointCover) {
  for (int d = 1; d <= 3; ++d) {
    const int max_side = d == 3 ? 8 : 16;
    for (int side = 1; side <= max_side; ++side) {
      const LatticeSpec lattice{d, side, 2};
      const Region parent = Region::whole(lattice);
      for (int m = 1; m <= side; ++m) {
        if (side % m != 0) continue;
        const auto parts = partition(parent, m);
        ASSERT_EQ(parts.size(), static_cast<std::size_t>(std::pow(m, d)));
        std::vector<int> hits(lattice.site_count(), 0);
        for (const auto& p : parts) {
          EXPECT_EQ(p.side, side / m);
          for (std::size_t s : site_mask(p, lattice)) ++hits[s];
          EXPECT_NEAR(euclidean_diameter_bound(p) * m, euclidean_diameter_bound(parent), 1e-12);
        }
        for (int h : hits) ASSERT_EQ(h, 1) << "d=" << d << " side=" << side << " m=" << m;
      }
    }
  }
}

TEST(DiameterBound, Examples) {
  EXPECT_DOUBLE_EQ(euclidean_diameter_bound(Region{{0}, 4}), 4.0);
  EXPECT_NEAR(euclidean_diameter_bound(Region{{0, 0}, 4}), 5.656854249492381, 1e-12);
  EXPECT_NEAR(euclidean_diameter_bound(Region{{0, 0, 0}, 1}), 1.7320508075688772, 1e-12);
}

TEST(SiteMask, Examples) {
  EXPECT_EQ(site_mask(Region{{2}, 2}, LatticeSpec{1, 4, 2}), (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(site_mask(Region{{0, 0}, 2}, LatticeSpec{2, 2, 2}), (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(code_of([] { site_mask(Region{{3}, 2}, LatticeSpec{1, 4, 2}); }), ErrorCode::kOutOfBounds);
}

TEST(SiteMask, RowMajorWithLastCoordinateFastest) {
  const LatticeSpec lattice{2, 4, 2};
  EXPECT_EQ(site_mask(Region{{0, 2}, 2}, lattice), (std::vector<std::size_t>{2, 3, 6, 7}));
  EXPECT_EQ(lattice.flat_index({1, 3}), 7u);
  EXPECT_EQ(lattice.coord_of(7), (Coord{1, 3}));
}

TEST(Lattice, Validation) {
  EXPECT_EQ(code_of([] { LatticeSpec{0, 4, 2}.validate(); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { LatticeSpec{1, 0, 2}.validate(); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { LatticeSpec{1, 4, 1}.validate(); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { LatticeSpec{100, 4, 2}.validate(); }), ErrorCode::kInvalidArgument);
  EXPECT_NO_THROW((LatticeSpec{3, 4, 3}.validate()));
}

TEST(Region, SitesAreLexicographic) {
  const auto sites = Region{{1, 1}, 2}.sites();
  ASSERT_EQ(sites.size(), 4u);
  EXPECT_EQ(sites[0], (Coord{1, 1}));
  EXPECT_EQ(sites[1], (Coord{1, 2}));
  EXPECT_EQ(sites[2], (Coord{2, 1}));
  EXPECT_EQ(sites[3], (Coord{2, 2}));
}
