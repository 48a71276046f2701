#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xwalk/geo.hpp"
#include "xwalk/transport.hpp"

namespace xwalk {

struct CrosswalkNode {
  std::int64_t osm_id = 0;
  GeoPoint location;

  friend bool operator==(const CrosswalkNode&, const CrosswalkNode&) = default;
};

inline constexpr std::string_view kDefaultOverpassEndpoint =
    "https://overpass-api.de/api/interpreter";

struct OverpassOptions {
  std::string endpoint{kDefaultOverpassEndpoint};
  RetryPolicy retry;
  std::size_t concurrency = 2;
  double max_extent = kDefaultMaxExtent;
};

/// Overpass QL selecting highway=crossing nodes inside `box`. Throws
/// QueryError when the box exceeds `max_extent` in either dimension.
std::string build_query(const BoundingBox& box, double max_extent = kDefaultMaxExtent);

/// Request for one sub-box query (POST, form-encoded `data=`).
HttpRequest overpass_request(const BoundingBox& box, const OverpassOptions& options);

/// Extracts node elements from an Overpass JSON body. Non-node elements and
/// nodes outside `box` are dropped. Throws ParseError on malformed JSON.
std::vector<CrosswalkNode> parse_overpass_response(std::string_view body, const BoundingBox& box);

/// Splits `box`, queries each sub-box (bounded parallelism), merges,
/// dedupes by osm_id and sorts by osm_id.
std::vector<CrosswalkNode> fetch_crosswalks(const BoundingBox& box, Transport& transport,
                                            const OverpassOptions& options = {});

/// Sorted, id-unique union (first occurrence wins).
std::vector<CrosswalkNode> merge_crosswalks(std::vector<CrosswalkNode> nodes);

/// `osm_id,lat,lon` with a header row and 7-decimal coordinates.
std::string format_crosswalks_csv(std::span<const CrosswalkNode> nodes);
std::vector<CrosswalkNode> parse_crosswalks_csv(std::string_view text);

std::vector<GeoPoint> locations(std::span<const CrosswalkNode> nodes);

}  // namespace xwalk
