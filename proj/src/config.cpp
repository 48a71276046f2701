#include "xwalk/config.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <functional>

#include "xwalk/error.hpp"
#include "xwalk/io.hpp"

namespace xwalk {

void PipelineConfig::validate() const {
  auto positive = [](double v, std::string_view name) {
    if (!(v > 0.0)) throw ConfigError(fmt::format("{} must be positive ({})", name, v));
  };
  positive(spacing, "spacing");
  positive(d_min, "d_min");
  positive(d_max, "d_max");
  positive(max_extent, "max_extent");
  if (!(d_min < d_max)) throw ConfigError(fmt::format("d_min ({}) must be below d_max ({})", d_min, d_max));
  if (max_waypoints == 0 || max_waypoints > 21) throw ConfigError("max_waypoints must be in [1, 21]");
  if (osm_concurrency == 0 || route_concurrency == 0 || image_concurrency == 0)
    throw ConfigError("concurrency bounds must be at least 1");
  if (retry_attempts < 1) throw ConfigError("retry_attempts must be at least 1");
  if (fixtures && network == NetworkMode::live)
    throw ConfigError("live network access is not permitted in fixture mode");
  TileSpec{{0, 0}, zoom, tile_width, tile_height, "satellite"}.validate();
}

RetryPolicy PipelineConfig::retry_policy() const {
  RetryPolicy p;
  p.max_attempts = retry_attempts;
  p.base_delay = retry_base_delay;
  p.seed = seed;
  return p;
}

std::vector<NamedRegion> PipelineConfig::load_regions() const {
  if (inline_region) return {*inline_region};
  if (regions.empty()) throw InputError("no regions configured (use --region or `regions` in the config)");
  if (!std::filesystem::exists(regions)) throw InputError("regions file not found: " + regions.string());
  auto list = read_regions_file(regions.string());
  if (list.empty()) throw InputError("regions file is empty: " + regions.string());
  return list;
}

namespace {

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
    return std::string(v.substr(1, v.size() - 2));
  return std::string(v);
}

// Strips a trailing comment outside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

void apply_config_text(PipelineConfig& c, std::string_view text, const std::filesystem::path& base_dir) {
  auto path_of = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  using Setter = std::function<void(const std::string&)>;
  auto num = [](double& field) {
    return Setter([&field](const std::string& v) { field = io::parse_double(v, "config value"); });
  };
  auto count = [](std::size_t& field) {
    return Setter([&field](const std::string& v) {
      const auto n = io::parse_int(v, "config value");
      if (n < 0) throw ConfigError("negative count in config");
      field = static_cast<std::size_t>(n);
    });
  };
  auto integer = [](int& field) {
    return Setter([&field](const std::string& v) { field = static_cast<int>(io::parse_int(v, "config value")); });
  };
  auto text_of = [](std::string& field) { return Setter([&field](const std::string& v) { field = v; }); };

  const std::map<std::string, Setter, std::less<>> setters = {
      {"regions", [&](const std::string& v) { c.regions = path_of(v); }},
      {"dataset_root", [&](const std::string& v) { c.dataset_root = path_of(v); }},
      {"fixtures", [&](const std::string& v) { c.fixtures = path_of(v); }},
      {"overpass_endpoint", text_of(c.overpass_endpoint)},
      {"directions_endpoint", text_of(c.directions_endpoint)},
      {"staticmap_endpoint", text_of(c.staticmap_endpoint)},
      {"api_key", text_of(c.api_key)},
      {"spacing", num(c.spacing)},
      {"d_min", num(c.d_min)},
      {"d_max", num(c.d_max)},
      {"max_extent", num(c.max_extent)},
      {"max_waypoints", count(c.max_waypoints)},
      {"routing_order",
       [&](const std::string& v) {
         if (v == "nearest_neighbor") c.routing_order = RoutingOrder::nearest_neighbor;
         else if (v == "identity") c.routing_order = RoutingOrder::identity;
         else throw ConfigError("routing_order must be nearest_neighbor or identity");
       }},
      {"zoom", integer(c.zoom)},
      {"tile_width", integer(c.tile_width)},
      {"tile_height", integer(c.tile_height)},
      {"osm_concurrency", count(c.osm_concurrency)},
      {"route_concurrency", count(c.route_concurrency)},
      {"image_concurrency", count(c.image_concurrency)},
      {"route_rate", num(c.route_rate)},
      {"image_rate", num(c.image_rate)},
      {"retry_attempts", integer(c.retry_attempts)},
      {"retry_base_delay_ms",
       [&](const std::string& v) { c.retry_base_delay = std::chrono::milliseconds(io::parse_int(v, "retry_base_delay_ms")); }},
      {"seed", [&](const std::string& v) { c.seed = static_cast<std::uint64_t>(io::parse_int(v, "seed")); }},
      {"train_ratio", num(c.split_ratios.train)},
      {"val_ratio", num(c.split_ratios.val)},
      {"test_ratio", num(c.split_ratios.test)},
      {"city", text_of(c.locality.city)},
      {"country", text_of(c.locality.country)},
      {"continent", text_of(c.locality.continent)},
      {"manifest_name", text_of(c.manifest_name)},
      {"network",
       [&](const std::string& v) {
         if (v == "auto") c.network = NetworkMode::automatic;
         else if (v == "live") c.network = NetworkMode::live;
         else if (v == "offline") c.network = NetworkMode::offline;
         else throw ConfigError("network must be auto, live or offline");
       }},
  };

  std::size_t line_no = 0;
  for (auto raw : io::split_lines(text)) {
    ++line_no;
    auto line = io::trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(fmt::format("config line {}: unterminated section", line_no));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("config line {}: expected key = value", line_no));
    const auto key = io::trim(line.substr(0, eq));
    const auto value = unquote(io::trim(line.substr(eq + 1)));
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(fmt::format("config line {}: unknown key '{}'", line_no, key));
    try {
      it->second(value);
    } catch (const FormatError& e) {
      throw ConfigError(fmt::format("config line {} ({}): {}", line_no, key, e.what()));
    }
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("config file not found: " + path.string());
  PipelineConfig config;
  apply_config_text(config, io::read_file(path), path.parent_path());
  return config;
}

void apply_environment(PipelineConfig& config) {
  if (!config.api_key.empty()) return;
  if (const char* key = std::getenv("GMAPS_API_KEY")) config.api_key = key;
}

std::unique_ptr<Transport> open_transport(const PipelineConfig& config) {
  config.validate();
  if (config.fixtures) return std::make_unique<FixtureTransport>(*config.fixtures);
  if (config.network == NetworkMode::offline)
    throw ConfigError("network access refused: offline mode without a fixture directory");
  return std::make_unique<LiveTransport>();
}

}  // namespace xwalk
