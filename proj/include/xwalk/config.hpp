#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "xwalk/dataset.hpp"
#include "xwalk/directions_client.hpp"
#include "xwalk/transport.hpp"

namespace xwalk {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class NetworkMode { automatic, live, offline };

/// Every acquisition parameter, with the standard acquisition defaults.
struct PipelineConfig {
  std::filesystem::path regions;
  /// Inline region given on the command line instead of a regions file.
  std::optional<NamedRegion> inline_region;
  std::filesystem::path dataset_root = "dataset";

  std::string overpass_endpoint{kDefaultOverpassEndpoint};
  std::string directions_endpoint{kDefaultDirectionsEndpoint};
  std::string staticmap_endpoint{kDefaultStaticMapEndpoint};
  std::string api_key;

  double spacing = 1.5e-4;
  double d_min = 3e-4;
  double d_max = 6e-4;
  double max_extent = 0.25;
  std::size_t max_waypoints = kMaxWaypoints;
  RoutingOrder routing_order = RoutingOrder::nearest_neighbor;

  int zoom = 20;
  int tile_width = 200;
  int tile_height = 225;

  std::size_t osm_concurrency = 2;
  std::size_t route_concurrency = 4;
  std::size_t image_concurrency = 8;
  double route_rate = 10.0;
  double image_rate = 20.0;
  int retry_attempts = 5;
  std::chrono::milliseconds retry_base_delay{1000};

  std::uint64_t seed = 0;
  SplitRatios split_ratios;

  std::optional<std::filesystem::path> fixtures;
  NetworkMode network = NetworkMode::automatic;

  Locality locality{"city", "country", "continent"};
  std::string manifest_name;

  /// Throws ConfigError for non-positive thresholds, d_min >= d_max, or a
  /// live-network request combined with a fixture directory.
  void validate() const;

  RetryPolicy retry_policy() const;
  std::vector<NamedRegion> load_regions() const;
};

/// Flat TOML-style `key = value` document; `[section]` headers are allowed
/// and ignored, `#` starts a comment. Relative paths resolve against the
/// file's directory. Unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& path);
void apply_config_text(PipelineConfig& config, std::string_view text,
                       const std::filesystem::path& base_dir = {});

/// Reads GMAPS_API_KEY when no key was configured.
void apply_environment(PipelineConfig& config);

/// FixtureTransport in fixture mode, LiveTransport otherwise; refuses the
/// network in offline mode.
std::unique_ptr<Transport> open_transport(const PipelineConfig& config);

}  // namespace xwalk
