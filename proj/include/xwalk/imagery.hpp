#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xwalk/geo.hpp"
#include "xwalk/transport.hpp"

namespace xwalk {

struct TileSpec {
  GeoPoint center;
  int zoom = 20;
  int width_px = 200;
  int height_px = 225;
  std::string maptype = "satellite";

  /// Throws GeoError when zoom or size fall outside the endpoint's limits.
  void validate() const;
};

inline constexpr std::string_view kDefaultStaticMapEndpoint =
    "https://maps.googleapis.com/maps/api/staticmap";

/// Everything but the key; doubles as the fixture material.
std::string tile_url_without_key(const TileSpec& tile, std::string_view endpoint = kDefaultStaticMapEndpoint);
std::string build_tile_url(const TileSpec& tile, std::string_view api_key,
                           std::string_view endpoint = kDefaultStaticMapEndpoint);

/// Web-Mercator ground resolution in meters per pixel.
double ground_resolution(double lat_degrees, int zoom);

/// Ground footprint (width_m, height_m). Throws ProjectionError for |lat| >= 85.
std::pair<double, double> coverage_meters(const TileSpec& tile);

/// One tile to fetch; `relative_path` is resolved against the tile root.
struct TileJob {
  std::string id;
  GeoPoint center;
  std::filesystem::path relative_path;
};

/// `<label>/<lat7>_<lon7>.png`
std::filesystem::path tile_relative_path(std::string_view label, const GeoPoint& center);

struct DownloadStatus {
  std::string id;
  /// downloaded | cached | pending | failed:<reason>
  std::string status;
  std::size_t bytes = 0;
  int attempts = 0;
};

struct FetchImagesOptions {
  std::string endpoint{kDefaultStaticMapEndpoint};
  std::string api_key;
  int zoom = 20;
  int width_px = 200;
  int height_px = 225;
  std::size_t concurrency = 8;
  double requests_per_second = 20.0;
  RetryPolicy retry;
};

struct FetchImagesReport {
  std::vector<DownloadStatus> statuses;  // job order
  std::size_t downloaded = 0;
  std::size_t cached = 0;
  std::size_t failed = 0;
  std::size_t pending = 0;
  bool quota_exceeded = false;
};

/// Downloads every job not already on disk. Failures are recorded per tile
/// and do not stop the run; an HTTP 403 (quota exhausted) stops dispatching
/// and leaves the remaining jobs `pending`.
FetchImagesReport fetch_images(std::span<const TileJob> jobs, const std::filesystem::path& tile_root,
                               Transport& transport, const FetchImagesOptions& options = {});

/// JSON Lines `{id, status, bytes, attempts}`.
std::string format_status_ledger(std::span<const DownloadStatus> statuses);
std::vector<DownloadStatus> parse_status_ledger(std::string_view text);

}  // namespace xwalk
