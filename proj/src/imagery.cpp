#include "xwalk/imagery.hpp"

#include <fmt/format.h>

#include <cmath>
#include <mutex>
#include <nlohmann/json.hpp>
#include <numbers>

#include "xwalk/error.hpp"
#include "xwalk/io.hpp"
#include "xwalk/log.hpp"

namespace xwalk {

void TileSpec::validate() const {
  if (!is_valid(center)) throw GeoError("tile center out of range");
  if (zoom < 0 || zoom > 21) throw GeoError(fmt::format("zoom {} outside [0, 21]", zoom));
  if (width_px < 1 || width_px > 640 || height_px < 1 || height_px > 640)
    throw GeoError(fmt::format("tile size {}x{} outside [1, 640]", width_px, height_px));
  if (maptype.empty()) throw GeoError("empty maptype");
}

std::string tile_url_without_key(const TileSpec& tile, std::string_view endpoint) {
  tile.validate();
  return fmt::format("{}?center={},{}&zoom={}&size={}x{}&maptype={}", endpoint,
                     format_coord(tile.center.lat), format_coord(tile.center.lon), tile.zoom,
                     tile.width_px, tile.height_px, tile.maptype);
}

std::string build_tile_url(const TileSpec& tile, std::string_view api_key, std::string_view endpoint) {
  return tile_url_without_key(tile, endpoint) + "&key=" + url_encode(api_key);
}

double ground_resolution(double lat_degrees, int zoom) {
  return 156543.03392 * std::cos(lat_degrees * std::numbers::pi / 180.0) / std::ldexp(1.0, zoom);
}

std::pair<double, double> coverage_meters(const TileSpec& tile) {
  tile.validate();
  if (std::abs(tile.center.lat) >= 85.0)
    throw ProjectionError(fmt::format("latitude {} is outside the Web-Mercator range", tile.center.lat));
  const double res = ground_resolution(tile.center.lat, tile.zoom);
  return {tile.width_px * res, tile.height_px * res};
}

std::filesystem::path tile_relative_path(std::string_view label, const GeoPoint& center) {
  return std::filesystem::path(std::string(label)) /
         (format_coord(center.lat) + "_" + format_coord(center.lon) + ".png");
}

FetchImagesReport fetch_images(std::span<const TileJob> jobs, const std::filesystem::path& tile_root,
                               Transport& transport, const FetchImagesOptions& options) {
  FetchImagesReport report;
  report.statuses.resize(jobs.size());
  std::atomic<bool> stop{false};
  std::mutex ledger_mutex;
  RateLimiter limiter(options.requests_per_second);

  parallel_for(jobs.size(), options.concurrency, [&](std::size_t i) {
    const auto& job = jobs[i];
    DownloadStatus status{job.id, "pending", 0, 0};
    const auto target = tile_root / job.relative_path;
    auto finish = [&] {
      std::lock_guard lock(ledger_mutex);
      report.statuses[i] = status;
    };
    if (std::filesystem::exists(target)) {
      status.status = "cached";
      status.bytes = std::filesystem::file_size(target);
      return finish();
    }
    if (stop.load()) return finish();

    HttpRequest request;
    request.service = "staticmap";
    const TileSpec tile{job.center, options.zoom, options.width_px, options.height_px, "satellite"};
    request.fixture_material = tile_url_without_key(tile, options.endpoint);
    request.url = request.fixture_material + "&key=" + url_encode(options.api_key);

    limiter.acquire();
    if (stop.load()) return finish();
    try {
      auto outcome = send_with_retry(transport, request, options.retry);
      status.attempts = outcome.attempts;
      if (outcome.response.status == 403) {
        stop = true;
        status.status = "pending";
      } else if (outcome.response.status != 200) {
        status.status = fmt::format("failed:http_{}", outcome.response.status);
      } else if (outcome.response.body.empty()) {
        status.status = "failed:empty_body";
      } else {
        io::write_file_atomic(target, outcome.response.body);
        status.status = "downloaded";
        status.bytes = outcome.response.body.size();
      }
    } catch (const TransportError&) {
      status.attempts = std::max(1, options.retry.max_attempts);
      status.status = "failed:transport";
    }
    finish();
  });

  report.quota_exceeded = stop.load();
  for (const auto& s : report.statuses) {
    if (s.status == "downloaded") ++report.downloaded;
    else if (s.status == "cached") ++report.cached;
    else if (s.status == "pending") ++report.pending;
    else ++report.failed;
  }
  if (report.quota_exceeded)
    log::warn(fmt::format("static map quota exhausted; {} tile(s) left pending", report.pending));
  return report;
}

std::string format_status_ledger(std::span<const DownloadStatus> statuses) {
  std::string out;
  for (const auto& s : statuses) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["status"] = s.status;
    j["bytes"] = s.bytes;
    j["attempts"] = s.attempts;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<DownloadStatus> parse_status_ledger(std::string_view text) {
  std::vector<DownloadStatus> out;
  std::size_t line_no = 0;
  for (auto line : io::split_lines(text)) {
    ++line_no;
    if (io::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("id").get<std::string>(), j.at("status").get<std::string>(),
                     j.at("bytes").get<std::size_t>(), j.at("attempts").get<int>()});
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(fmt::format("status ledger line {}: {}", line_no, e.what()));
    }
  }
  return out;
}

}  // namespace xwalk
