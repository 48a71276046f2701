#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "xwalk/directions_client.hpp"
#include "xwalk/error.hpp"

namespace xwalk {
namespace {

using testing::MockTransport;

std::vector<CrosswalkNode> nodes_at(const std::vector<GeoPoint>& pts) {
  std::vector<CrosswalkNode> out;
  for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({static_cast<std::int64_t>(i + 1), pts[i]});
  return out;
}

std::vector<GeoPoint> line_of(std::size_t n) {
  std::vector<GeoPoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({0.0, 1e-4 * static_cast<double>(i)});
  return pts;
}

TEST(OrderForRouting, NearestNeighbourFromSouthWest) {
  const auto order = order_for_routing(nodes_at({{0, 0}, {0, 2}, {0, 1}}));
  EXPECT_EQ(order, (std::vector<GeoPoint>{{0, 0}, {0, 1}, {0, 2}}));
  const auto single = order_for_routing(nodes_at({{5, 5}}));
  EXPECT_EQ(single, (std::vector<GeoPoint>{{5, 5}}));
  EXPECT_TRUE(order_for_routing({}).empty());
}

TEST(OrderForRouting, StartsAtMinLatThenMinLon) {
  const auto order = order_for_routing(nodes_at({{1, 0}, {0, 3}, {0, 1}}));
  EXPECT_EQ(order.front(), (GeoPoint{0, 1}));
}

TEST(OrderForRouting, IdentityKeepsInputOrder) {
  const std::vector<GeoPoint> pts{{0, 2}, {0, 0}, {0, 1}};
  EXPECT_EQ(order_for_routing(nodes_at(pts), RoutingOrder::identity), pts);
}

TEST(OrderForRouting, IsPermutation) {
  std::mt19937_64 rng(8);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 300; ++i) pts.push_back(testing::random_point(rng, 0, 0.1, 0, 0.1));
  auto order = order_for_routing(nodes_at(pts));
  auto less = [](const GeoPoint& a, const GeoPoint& b) { return std::tie(a.lat, a.lon) < std::tie(b.lat, b.lon); };
  std::sort(order.begin(), order.end(), less);
  std::sort(pts.begin(), pts.end(), less);
  EXPECT_EQ(order, pts);
}

TEST(PlanRequests, Examples) {
  EXPECT_THROW(plan_requests(line_of(1)), PlanningError);
  EXPECT_THROW(plan_requests(line_of(0)), PlanningError);

  const auto two = plan_requests(line_of(2));
  ASSERT_EQ(two.size(), 1u);
  EXPECT_TRUE(two[0].waypoints.empty());

  const auto full = plan_requests(line_of(22));
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0].waypoints.size(), 20u);

  const auto split = plan_requests(line_of(23));
  ASSERT_EQ(split.size(), 2u);
  EXPECT_EQ(split[0].destination, split[1].origin);

  EXPECT_EQ(plan_requests(line_of(43)).size(), 2u);
  EXPECT_EQ(plan_requests(line_of(44)).size(), 3u);
}

TEST(PlanRequests, CountAndCoverageForAllSizes) {
  for (std::size_t n = 2; n <= 2000; ++n) {
    const auto pts = line_of(n);
    const auto reqs = plan_requests(pts);
    ASSERT_EQ(reqs.size(), (n - 1 + 20) / 21) << n;
    std::vector<GeoPoint> joined;
    for (std::size_t r = 0; r < reqs.size(); ++r) {
      const auto p = reqs[r].points();
      ASSERT_LE(reqs[r].waypoints.size(), kMaxWaypoints);
      if (r > 0) ASSERT_EQ(reqs[r - 1].destination, reqs[r].origin);
      joined.insert(joined.end(), p.begin() + (r == 0 ? 0 : 1), p.end());
    }
    ASSERT_EQ(joined, pts) << n;
  }
}

TEST(DirectionsUrl, EncodesWaypoints) {
  RouteRequest r{{1, 2}, {3, 4}, {{5, 6}, {7, 8}}};
  EXPECT_EQ(directions_url(r, "https://h/d"),
            "https://h/d?origin=1.0000000,2.0000000&destination=3.0000000,4.0000000"
            "&waypoints=5.0000000,6.0000000%7C7.0000000,8.0000000");
  DirectionsOptions opts;
  opts.endpoint = "https://h/d";
  opts.api_key = "K";
  const auto req = directions_request(r, opts);
  EXPECT_EQ(req.url, req.fixture_material + "&key=K");
  EXPECT_EQ(req.fixture_material.find("key="), std::string::npos);
}

TEST(ParseDirections, Examples) {
  const auto ok = parse_directions_response(
      R"({"status":"OK","routes":[{"overview_polyline":{"points":"??"}}]})", 4);
  EXPECT_EQ(ok.encoded, "??");
  EXPECT_EQ(ok.request_index, 4u);
  EXPECT_THROW(parse_directions_response(R"({"status":"ZERO_RESULTS","routes":[]})", 0), RouteNotFound);
  EXPECT_THROW(parse_directions_response(R"({"status":"OK","routes":[{}]})", 0), ParseError);
  EXPECT_THROW(parse_directions_response(R"({"status":"OK","routes":[{"overview_polyline":{"points":"_"}}]})", 0),
               ParseError);
  EXPECT_THROW(parse_directions_response(R"({"status":"REQUEST_DENIED"})", 0), FetchError);
  EXPECT_THROW(parse_directions_response("{", 0), ParseError);
}

TEST(FetchRoutes, SkipsRouteNotFoundAndKeepsOrder) {
  const auto reqs = plan_requests(line_of(70));  // ceil(69/21) = 4 requests
  ASSERT_EQ(reqs.size(), 4u);
  MockTransport t(
      [&](const HttpRequest& req) {
        if (req.url == directions_url(reqs[2], kDefaultDirectionsEndpoint) + "&key=K")
          return HttpResponse{200, R"({"status":"ZERO_RESULTS","routes":[]})"};
        return HttpResponse{200, R"({"status":"OK","routes":[{"overview_polyline":{"points":"??"}}]})"};
      },
      std::chrono::milliseconds(5));
  DirectionsOptions opts;
  opts.api_key = "K";
  opts.retry = testing::instant_retry();
  opts.requests_per_second = 0;
  opts.concurrency = 2;
  const auto results = fetch_routes(reqs, t, opts);
  ASSERT_EQ(results.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(results[i].request_index, i);
  EXPECT_FALSE(results[2].route.has_value());
  EXPECT_FALSE(results[2].skipped_reason.empty());
  EXPECT_TRUE(results[3].route.has_value());
  EXPECT_LE(t.max_in_flight(), 2);
}

TEST(FetchRoutes, OtherErrorsPropagate) {
  const auto reqs = plan_requests(line_of(3));
  MockTransport t([](const HttpRequest&) { return HttpResponse{400, "bad"}; });
  DirectionsOptions opts;
  opts.retry = testing::instant_retry();
  EXPECT_THROW(fetch_routes(reqs, t, opts), FetchError);
}

}  // namespace
}  // namespace xwalk
