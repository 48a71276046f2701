#include "xwalk/osm_client.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "xwalk/error.hpp"
#include "xwalk/io.hpp"

namespace xwalk {

namespace {

// Six decimals with trailing zeros stripped: 0 -> "0", 0.1 -> "0.1".
std::string query_number(double value) {
  auto text = format_coord(value, 6);
  text.erase(text.find_last_not_of('0') + 1);
  if (text.back() == '.') text.pop_back();
  if (text == "-0") text = "0";
  return text;
}

std::string describe(const BoundingBox& b) {
  return fmt::format("({},{},{},{})", query_number(b.south()), query_number(b.west()),
                     query_number(b.north()), query_number(b.east()));
}

}  // namespace

std::string build_query(const BoundingBox& box, double max_extent) {
  if (box.height() > max_extent || box.width() > max_extent)
    throw QueryError(fmt::format("box {} exceeds {} degrees; split the region first",
                                 describe(box), max_extent));
  return fmt::format("[out:json];node[\"highway\"=\"crossing\"]{};out;", describe(box));
}

HttpRequest overpass_request(const BoundingBox& box, const OverpassOptions& options) {
  HttpRequest request;
  request.method = "POST";
  request.url = options.endpoint;
  request.service = "overpass";
  request.fixture_material = build_query(box, options.max_extent);
  request.body = "data=" + url_encode(request.fixture_material);
  request.content_type = "application/x-www-form-urlencoded";
  return request;
}

std::vector<CrosswalkNode> parse_overpass_response(std::string_view body, const BoundingBox& box) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed Overpass response: " + std::string(e.what()), e.byte);
  }
  if (!doc.is_object() || !doc.contains("elements") || !doc["elements"].is_array())
    throw ParseError("Overpass response lacks an 'elements' array", 0);
  std::vector<CrosswalkNode> nodes;
  for (const auto& element : doc["elements"]) {
    if (!element.is_object() || element.value("type", "node") != "node") continue;
    if (!element.contains("id") || !element.contains("lat") || !element.contains("lon") ||
        !element["id"].is_number_integer() || !element["lat"].is_number() ||
        !element["lon"].is_number())
      throw ParseError("Overpass node element lacks numeric id/lat/lon", 0);
    const GeoPoint location{element["lat"].get<double>(), element["lon"].get<double>()};
    if (!is_valid(location) || !contains(box, location)) continue;
    nodes.push_back({element["id"].get<std::int64_t>(), location});
  }
  return nodes;
}

std::vector<CrosswalkNode> merge_crosswalks(std::vector<CrosswalkNode> nodes) {
  std::stable_sort(nodes.begin(), nodes.end(),
                   [](const auto& a, const auto& b) { return a.osm_id < b.osm_id; });
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](const auto& a, const auto& b) { return a.osm_id == b.osm_id; }),
              nodes.end());
  return nodes;
}

std::vector<CrosswalkNode> fetch_crosswalks(const BoundingBox& box, Transport& transport,
                                            const OverpassOptions& options) {
  const auto parts = split_region(box, options.max_extent);
  std::vector<std::vector<CrosswalkNode>> per_part(parts.size());
  parallel_for(parts.size(), options.concurrency, [&](std::size_t i) {
    const auto request = overpass_request(parts[i], options);
    SendOutcome outcome;
    try {
      outcome = send_with_retry(transport, request, options.retry);
    } catch (const TransportError& e) {
      throw FetchError("Overpass query for sub-box " + describe(parts[i]) + " failed: " + e.what());
    }
    if (outcome.response.status != 200)
      throw FetchError(fmt::format("Overpass query for sub-box {} failed with HTTP {} after {} attempt(s)",
                                   describe(parts[i]), outcome.response.status, outcome.attempts));
    per_part[i] = parse_overpass_response(outcome.response.body, parts[i]);
  });
  std::vector<CrosswalkNode> all;
  for (auto& part : per_part) all.insert(all.end(), part.begin(), part.end());
  return merge_crosswalks(std::move(all));
}

std::string format_crosswalks_csv(std::span<const CrosswalkNode> nodes) {
  std::string out = "osm_id,lat,lon\n";
  for (const auto& n : nodes)
    out += fmt::format("{},{},{}\n", n.osm_id, format_coord(n.location.lat),
                       format_coord(n.location.lon));
  return out;
}

std::vector<CrosswalkNode> parse_crosswalks_csv(std::string_view text) {
  std::vector<CrosswalkNode> nodes;
  const auto lines = io::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (io::trim(lines[i]).empty()) continue;
    if (i == 0 && lines[i].starts_with("osm_id")) continue;
    const auto f = io::split_fields(lines[i]);
    if (f.size() != 3) throw FormatError(fmt::format("crosswalks line {}: expected osm_id,lat,lon", i + 1));
    nodes.push_back({io::parse_int(f[0], "osm_id"),
                     GeoPoint::checked(io::parse_double(f[1], "lat"), io::parse_double(f[2], "lon"))});
  }
  return nodes;
}

std::vector<GeoPoint> locations(std::span<const CrosswalkNode> nodes) {
  std::vector<GeoPoint> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(n.location);
  return out;
}

}  // namespace xwalk
