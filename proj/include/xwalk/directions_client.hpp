#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xwalk/geo.hpp"
#include "xwalk/osm_client.hpp"
#include "xwalk/transport.hpp"

namespace xwalk {

/// The directions API accepts 23 waypoints; 20 intermediates plus the two
/// endpoints stays below that.
inline constexpr std::size_t kMaxWaypoints = 20;

struct RouteRequest {
  GeoPoint origin;
  GeoPoint destination;
  std::vector<GeoPoint> waypoints;

  /// origin, waypoints..., destination
  std::vector<GeoPoint> points() const;
};

struct RoutePolyline {
  std::size_t request_index = 0;
  std::string encoded;
};

enum class RoutingOrder { nearest_neighbor, identity };

/// Greedy nearest-neighbour chain from the south-west-most point (min lat,
/// then min lon). Distance ties go to the earlier input element.
std::vector<GeoPoint> order_for_routing(std::span<const CrosswalkNode> crosswalks,
                                        RoutingOrder order = RoutingOrder::nearest_neighbor);

/// Chunks of up to max_waypoints + 2 points; consecutive chunks share one
/// endpoint. Throws PlanningError with fewer than two points.
std::vector<RouteRequest> plan_requests(std::span<const GeoPoint> ordered,
                                        std::size_t max_waypoints = kMaxWaypoints);

inline constexpr std::string_view kDefaultDirectionsEndpoint =
    "https://maps.googleapis.com/maps/api/directions/json";

struct DirectionsOptions {
  std::string endpoint{kDefaultDirectionsEndpoint};
  std::string api_key;
  RetryPolicy retry;
  std::size_t concurrency = 4;
  double requests_per_second = 10.0;
};

/// GET URL without the key parameter; this is also the fixture material.
std::string directions_url(const RouteRequest& request, std::string_view endpoint);
HttpRequest directions_request(const RouteRequest& request, const DirectionsOptions& options);

/// Reads routes[0].overview_polyline.points. Throws RouteNotFound for
/// ZERO_RESULTS / NOT_FOUND / empty routes, ParseError for malformed bodies
/// or an undecodable polyline, FetchError for other API statuses.
RoutePolyline parse_directions_response(std::string_view body, std::size_t request_index);

RoutePolyline fetch_route(const RouteRequest& request, std::size_t request_index,
                          Transport& transport, const DirectionsOptions& options);

struct RouteResult {
  std::size_t request_index = 0;
  std::optional<RoutePolyline> route;
  /// Set when the route was skipped (route-not-found).
  std::string skipped_reason;
};

/// Fetches every request with bounded parallelism under a shared rate
/// limiter. Route-not-found requests are skipped, other errors propagate.
/// Results are ordered by request index.
std::vector<RouteResult> fetch_routes(std::span<const RouteRequest> requests, Transport& transport,
                                      const DirectionsOptions& options);

}  // namespace xwalk
