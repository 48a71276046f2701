#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "xwalk/error.hpp"
#include "xwalk/geo.hpp"

namespace xwalk {
namespace {

TEST(DegDistance, Examples) {
  EXPECT_EQ(deg_distance({0, 0}, {0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(deg_distance({0, 0}, {0, 3e-4}), 3e-4);
  EXPECT_NEAR(deg_distance({0, 0}, {3e-4, 4e-4}), 5e-4, 1e-18);
}

TEST(DegDistance, SymmetricAndTriangleInequality) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto a = testing::random_point(rng, -1, 1, -1, 1);
    const auto b = testing::random_point(rng, -1, 1, -1, 1);
    const auto c = testing::random_point(rng, -1, 1, -1, 1);
    EXPECT_EQ(deg_distance(a, b), deg_distance(b, a));
    EXPECT_LE(deg_distance(a, c), deg_distance(a, b) + deg_distance(b, c) + 1e-15);
    EXPECT_GT(deg_distance(a, b), 0.0);
  }
}

TEST(ApproxMeters, Examples) {
  EXPECT_NEAR(approx_meters({0, 0}, {1.5e-4, 0}), 16.7, 1.0);
  EXPECT_EQ(approx_meters({0, 0}, {0, 0}), 0.0);
  // 111320 * 1e-3 * cos(45 deg), hand-computed.
  EXPECT_NEAR(approx_meters({45, 0}, {45, 1e-3}), 78.715, 0.01);
}

TEST(BoundingBox, RejectsInvalidBoxes) {
  EXPECT_THROW(BoundingBox(1, 0, 0, 1), GeoError);
  EXPECT_THROW(BoundingBox(0, 1, 1, 1), GeoError);
  EXPECT_THROW(BoundingBox(0, 170, 1, -170), GeoError);  // antimeridian
  EXPECT_THROW(BoundingBox(86, 0, 89, 1), GeoError);     // polar
  EXPECT_THROW(BoundingBox(0, 0, 91, 1), GeoError);
  EXPECT_NO_THROW(BoundingBox(40.764498, -73.981447, 40.799976, -73.949402));
}

TEST(SplitRegion, CentralParkIsOneBox) {
  const BoundingBox park(40.764498, -73.981447, 40.799976, -73.949402);
  const auto parts = split_region(park);
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0], park);
}

TEST(SplitRegion, ExactQuarterDegreeIsNotSplit) {
  EXPECT_EQ(split_region(BoundingBox(10, 20, 10.25, 20.25)).size(), 1u);
  EXPECT_EQ(split_region(BoundingBox(0, 0, 0.25, 0.25)).size(), 1u);
}

TEST(SplitRegion, GridOrderedRowMajorFromSouthWest) {
  const BoundingBox box(0, 0, 0.6, 0.3);
  const auto parts = split_region(box);
  ASSERT_EQ(parts.size(), 6u);  // 3 rows x 2 cols
  EXPECT_DOUBLE_EQ(parts[0].south(), 0.0);
  EXPECT_DOUBLE_EQ(parts[0].west(), 0.0);
  EXPECT_DOUBLE_EQ(parts[1].south(), 0.0);
  EXPECT_DOUBLE_EQ(parts[1].west(), 0.15);
  EXPECT_DOUBLE_EQ(parts[2].south(), 0.2);
  EXPECT_DOUBLE_EQ(parts[5].north(), 0.6);
  EXPECT_DOUBLE_EQ(parts[5].east(), 0.3);
}

TEST(SplitRegion, RejectsNonPositiveExtent) {
  EXPECT_THROW(split_region(BoundingBox(0, 0, 1, 1), 0.0), GeoError);
}

TEST(SplitRegion, FuzzedInvariants) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lat(-80, 79), lon(-179, 178), ext(1e-4, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double s = lat(rng), w = lon(rng);
    const BoundingBox box(s, w, s + ext(rng), w + ext(rng));
    const auto parts = split_region(box);
    double area = 0;
    for (const auto& p : parts) {
      EXPECT_LE(p.height(), 0.25 + 1e-12);
      EXPECT_LE(p.width(), 0.25 + 1e-12);
      EXPECT_TRUE(contains(box, p.south_west()));
      EXPECT_TRUE(contains(box, p.north_east()));
      area += p.area();
    }
    EXPECT_NEAR(area, box.area(), 1e-12 * box.area());
  }
}

TEST(Contains, ClosedBox) {
  const BoundingBox box(0, 0, 1, 1);
  EXPECT_TRUE(contains(box, {0.5, 0.5}));
  EXPECT_TRUE(contains(box, {0, 0}));
  EXPECT_TRUE(contains(box, {1, 1}));
  EXPECT_FALSE(contains(box, {1.0000001, 0.5}));
}

TEST(Contains, MatchesBruteForceComparison) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5000; ++i) {
    const auto a = testing::random_point(rng, -2, 2, -2, 2);
    const auto b = testing::random_point(rng, -2, 2, -2, 2);
    const auto p = testing::random_point(rng, -2, 2, -2, 2);
    if (a.lat == b.lat || a.lon == b.lon) continue;
    const BoundingBox box(std::min(a.lat, b.lat), std::min(a.lon, b.lon), std::max(a.lat, b.lat),
                          std::max(a.lon, b.lon));
    const bool expected = !(p.lat < box.south()) && !(p.lat > box.north()) && !(p.lon < box.west()) &&
                          !(p.lon > box.east());
    EXPECT_EQ(contains(box, p), expected);
  }
}

TEST(FormatCoord, FixedSevenDecimals) {
  EXPECT_EQ(format_coord(0.0), "0.0000000");
  EXPECT_EQ(format_coord(-0.0), "0.0000000");
  EXPECT_EQ(format_coord(-1e-9), "0.0000000");
  EXPECT_EQ(format_coord(40.764498), "40.7644980");
  EXPECT_EQ(format_coord(-73.9814471), "-73.9814471");
}

TEST(Regions, ParsesCsvAndRejectsGarbage) {
  const auto regions = parse_regions("# comment\nnyc,40.764498,-73.981447,40.799976,-73.949402\n\n");
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0].name, "nyc");
  EXPECT_DOUBLE_EQ(regions[0].box.north(), 40.799976);
  EXPECT_THROW(parse_regions("a,1,2,3\n"), FormatError);
  EXPECT_THROW(parse_regions("a,1,2,x,4\n"), FormatError);
  EXPECT_THROW(parse_regions("a,1,2,0,4\n"), GeoError);
}

}  // namespace
}  // namespace xwalk
