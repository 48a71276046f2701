#include "xwalk/directions_client.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <nlohmann/json.hpp>

#include "xwalk/error.hpp"
#include "xwalk/log.hpp"
#include "xwalk/polyline.hpp"

namespace xwalk {

std::vector<GeoPoint> RouteRequest::points() const {
  std::vector<GeoPoint> out;
  out.reserve(waypoints.size() + 2);
  out.push_back(origin);
  out.insert(out.end(), waypoints.begin(), waypoints.end());
  out.push_back(destination);
  return out;
}

std::vector<GeoPoint> order_for_routing(std::span<const CrosswalkNode> crosswalks,
                                        RoutingOrder order) {
  std::vector<GeoPoint> pts = locations(crosswalks);
  if (order == RoutingOrder::identity || pts.size() <= 1) return pts;

  auto start = std::min_element(pts.begin(), pts.end(), [](const GeoPoint& a, const GeoPoint& b) {
    return a.lat != b.lat ? a.lat < b.lat : a.lon < b.lon;
  });
  std::vector<GeoPoint> chain;
  chain.reserve(pts.size());
  std::vector<bool> used(pts.size(), false);
  std::size_t current = static_cast<std::size_t>(start - pts.begin());
  used[current] = true;
  chain.push_back(pts[current]);
  for (std::size_t step = 1; step < pts.size(); ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (used[j]) continue;
      const double d = deg_distance(pts[current], pts[j]);
      if (d < best) {
        best = d;
        best_index = j;
      }
    }
    current = best_index;
    used[current] = true;
    chain.push_back(pts[current]);
  }
  return chain;
}

std::vector<RouteRequest> plan_requests(std::span<const GeoPoint> ordered,
                                        std::size_t max_waypoints) {
  if (ordered.size() < 2)
    throw PlanningError(fmt::format("route planning needs at least 2 points, got {}", ordered.size()));
  const std::size_t stride = max_waypoints + 1;
  std::vector<RouteRequest> requests;
  requests.reserve((ordered.size() - 2) / stride + 1);
  for (std::size_t begin = 0; begin + 1 < ordered.size(); begin += stride) {
    const std::size_t end = std::min(begin + stride, ordered.size() - 1);
    RouteRequest r;
    r.origin = ordered[begin];
    r.destination = ordered[end];
    r.waypoints.assign(ordered.begin() + static_cast<std::ptrdiff_t>(begin + 1),
                       ordered.begin() + static_cast<std::ptrdiff_t>(end));
    requests.push_back(std::move(r));
  }
  return requests;
}

namespace {
std::string latlon(const GeoPoint& p) {
  return format_coord(p.lat) + "," + format_coord(p.lon);
}
}  // namespace

std::string directions_url(const RouteRequest& request, std::string_view endpoint) {
  std::string url = fmt::format("{}?origin={}&destination={}", endpoint, latlon(request.origin),
                                latlon(request.destination));
  if (!request.waypoints.empty()) {
    url += "&waypoints=";
    for (std::size_t i = 0; i < request.waypoints.size(); ++i) {
      if (i) url += "%7C";
      url += latlon(request.waypoints[i]);
    }
  }
  return url;
}

HttpRequest directions_request(const RouteRequest& request, const DirectionsOptions& options) {
  HttpRequest http;
  http.service = "directions";
  http.fixture_material = directions_url(request, options.endpoint);
  http.url = http.fixture_material + "&key=" + url_encode(options.api_key);
  return http;
}

RoutePolyline parse_directions_response(std::string_view body, std::size_t request_index) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed directions response: " + std::string(e.what()), e.byte);
  }
  if (!doc.is_object()) throw ParseError("directions response is not an object", 0);
  const auto status = doc.value("status", std::string("OK"));
  if (status == "ZERO_RESULTS" || status == "NOT_FOUND")
    throw RouteNotFound(fmt::format("request {}: {}", request_index, status));
  if (status != "OK") throw FetchError(fmt::format("request {}: directions status {}", request_index, status));
  if (!doc.contains("routes") || !doc["routes"].is_array())
    throw ParseError("directions response lacks a 'routes' array", 0);
  if (doc["routes"].empty()) throw RouteNotFound(fmt::format("request {}: no routes", request_index));
  const auto& route = doc["routes"][0];
  if (!route.is_object() || !route.contains("overview_polyline") ||
      !route["overview_polyline"].is_object() || !route["overview_polyline"].contains("points") ||
      !route["overview_polyline"]["points"].is_string())
    throw ParseError("directions route lacks overview_polyline.points", 0);
  RoutePolyline result{request_index, route["overview_polyline"]["points"].get<std::string>()};
  try {
    polyline::decode(result.encoded);
  } catch (const DecodeError& e) {
    throw ParseError(std::string("undecodable overview polyline: ") + e.what(), 0);
  }
  return result;
}

RoutePolyline fetch_route(const RouteRequest& request, std::size_t request_index,
                          Transport& transport, const DirectionsOptions& options) {
  SendOutcome outcome;
  try {
    outcome = send_with_retry(transport, directions_request(request, options), options.retry);
  } catch (const TransportError& e) {
    throw FetchError(fmt::format("directions request {} failed: {}", request_index, e.what()));
  }
  if (outcome.response.status != 200)
    throw FetchError(fmt::format("directions request {} failed with HTTP {} after {} attempt(s)",
                                 request_index, outcome.response.status, outcome.attempts));
  return parse_directions_response(outcome.response.body, request_index);
}

std::vector<RouteResult> fetch_routes(std::span<const RouteRequest> requests, Transport& transport,
                                      const DirectionsOptions& options) {
  std::vector<RouteResult> results(requests.size());
  RateLimiter limiter(options.requests_per_second);
  parallel_for(requests.size(), options.concurrency, [&](std::size_t i) {
    results[i].request_index = i;
    limiter.acquire();
    try {
      results[i].route = fetch_route(requests[i], i, transport, options);
    } catch (const RouteNotFound& e) {
      log::warn(std::string("route skipped: ") + e.what());
      results[i].skipped_reason = e.what();
    }
  });
  return results;
}

}  // namespace xwalk
