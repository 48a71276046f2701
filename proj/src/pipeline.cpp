#include "xwalk/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

#include "xwalk/error.hpp"
#include "xwalk/io.hpp"
#include "xwalk/log.hpp"
#include "xwalk/metrics.hpp"
#include "xwalk/polyline.hpp"
#include "xwalk/raster.hpp"

namespace xwalk::pipeline {

namespace fs = std::filesystem;

namespace {

fs::path in_root(const PipelineConfig& c, std::string_view name) { return c.dataset_root / name; }

fs::path require(const fs::path& path, std::string_view produced_by) {
  if (!fs::exists(path))
    throw InputError(fmt::format("missing input {} (run `{}` first)", path.string(), produced_by));
  return path;
}

struct TransportHandle {
  std::unique_ptr<Transport> owned;
  Transport* active = nullptr;

  TransportHandle(const PipelineConfig& c, Transport* given) {
    c.validate();
    if (given) {
      active = given;
    } else {
      owned = open_transport(c);
      active = owned.get();
    }
  }
};

void require_key(const PipelineConfig& c) {
  if (!c.fixtures && c.api_key.empty())
    throw ConfigError("an API key is required for live requests (set GMAPS_API_KEY)");
}

std::vector<CrosswalkNode> load_crosswalks(const PipelineConfig& c) {
  return parse_crosswalks_csv(io::read_file(require(in_root(c, files::kCrosswalks), "fetch-crosswalks")));
}

std::vector<NegativeSample> load_negatives(const PipelineConfig& c) {
  return parse_negatives_csv(io::read_file(require(in_root(c, files::kNegatives), "gen-negatives")));
}

std::string manifest_name(const PipelineConfig& c) {
  return c.manifest_name.empty() ? c.locality.city : c.manifest_name;
}

nlohmann::ordered_json regions_json(const std::vector<NamedRegion>& regions) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : regions)
    arr.push_back({{"name", r.name},
                   {"south", r.box.south()},
                   {"west", r.box.west()},
                   {"north", r.box.north()},
                   {"east", r.box.east()}});
  return arr;
}

}  // namespace

nlohmann::ordered_json fetch_crosswalks(const PipelineConfig& config, Transport* transport) {
  TransportHandle t(config, transport);
  const auto regions = config.load_regions();
  OverpassOptions options;
  options.endpoint = config.overpass_endpoint;
  options.retry = config.retry_policy();
  options.concurrency = config.osm_concurrency;
  options.max_extent = config.max_extent;

  std::vector<CrosswalkNode> all;
  auto per_region = nlohmann::ordered_json::object();
  for (const auto& region : regions) {
    auto nodes = fetch_crosswalks(region.box, *t.active, options);
    per_region[region.name] = nodes.size();
    all.insert(all.end(), nodes.begin(), nodes.end());
  }
  all = merge_crosswalks(std::move(all));
  io::write_file_atomic(in_root(config, files::kCrosswalks), format_crosswalks_csv(all));
  return {{"stage", "fetch-crosswalks"}, {"crosswalks", all.size()}, {"per_region", per_region}};
}

nlohmann::ordered_json plan_routes(const PipelineConfig& config, Transport* transport) {
  TransportHandle t(config, transport);
  require_key(config);
  const auto regions = config.load_regions();
  const auto crosswalks = load_crosswalks(config);

  struct Planned {
    std::string region;
    RouteRequest request;
  };
  std::vector<Planned> planned;
  for (const auto& region : regions) {
    std::vector<CrosswalkNode> inside;
    for (const auto& c : crosswalks)
      if (contains(region.box, c.location)) inside.push_back(c);
    if (inside.size() < 2) {
      log::warn(fmt::format("region {}: {} crosswalk(s), no routes planned", region.name, inside.size()));
      continue;
    }
    const auto ordered = order_for_routing(inside, config.routing_order);
    for (auto& r : plan_requests(ordered, config.max_waypoints)) planned.push_back({region.name, std::move(r)});
  }

  std::vector<RouteRequest> requests;
  for (const auto& p : planned) requests.push_back(p.request);
  DirectionsOptions options;
  options.endpoint = config.directions_endpoint;
  options.api_key = config.api_key;
  options.retry = config.retry_policy();
  options.concurrency = config.route_concurrency;
  options.requests_per_second = config.route_rate;
  const auto results = fetch_routes(requests, *t.active, options);

  std::string out;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    nlohmann::ordered_json line;
    line["request_index"] = i;
    line["region"] = planned[i].region;
    line["waypoints"] = planned[i].request.waypoints.size();
    if (results[i].route) {
      line["status"] = "ok";
      line["polyline"] = results[i].route->encoded;
      ++ok;
    } else {
      line["status"] = "route_not_found";
      line["polyline"] = nullptr;
    }
    out += line.dump() + "\n";
  }
  io::write_file_atomic(in_root(config, files::kRoutes), out);
  return {{"stage", "plan-routes"}, {"requests", results.size()}, {"routes", ok},
          {"skipped", results.size() - ok}};
}

nlohmann::ordered_json gen_negatives(const PipelineConfig& config) {
  config.validate();
  const auto regions = config.load_regions();
  const auto crosswalk_points = locations(load_crosswalks(config));
  const auto routes_text = io::read_file(require(in_root(config, files::kRoutes), "plan-routes"));

  std::map<std::string, std::vector<RoutePolyline>> by_region;
  std::size_t line_no = 0;
  for (auto line : io::split_lines(routes_text)) {
    ++line_no;
    if (io::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("status").get<std::string>() != "ok") continue;
      by_region[j.at("region").get<std::string>()].push_back(
          {j.at("request_index").get<std::size_t>(), j.at("polyline").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(fmt::format("{} line {}: {}", files::kRoutes, line_no, e.what()));
    }
  }

  std::vector<NegativeSample> all;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  auto per_region = nlohmann::ordered_json::object();
  const DistanceBand band{config.d_min, config.d_max};
  for (const auto& region : regions) {
    const auto& routes = by_region[region.name];
    auto negatives = generate_negatives(routes, crosswalk_points, region.box, config.spacing, band);
    std::size_t kept = 0;
    for (const auto& n : negatives) {
      if (!seen.emplace(polyline::quantize_steps(n.location.lat), polyline::quantize_steps(n.location.lon)).second)
        continue;
      all.push_back(n);
      ++kept;
    }
    per_region[region.name] = kept;
  }
  io::write_file_atomic(in_root(config, files::kNegatives), format_negatives_csv(all));
  return {{"stage", "gen-negatives"}, {"negatives", all.size()}, {"per_region", per_region}};
}

nlohmann::ordered_json fetch_images(const PipelineConfig& config, Transport* transport) {
  TransportHandle t(config, transport);
  require_key(config);
  const auto samples = collect_samples(load_crosswalks(config), load_negatives(config), config.locality);
  const auto jobs = tile_jobs(samples);
  FetchImagesOptions options;
  options.endpoint = config.staticmap_endpoint;
  options.api_key = config.api_key;
  options.zoom = config.zoom;
  options.width_px = config.tile_width;
  options.height_px = config.tile_height;
  options.concurrency = config.image_concurrency;
  options.requests_per_second = config.image_rate;
  options.retry = config.retry_policy();
  const auto rep = xwalk::fetch_images(jobs, config.dataset_root / kRawTileDir, *t.active, options);
  io::write_file_atomic(in_root(config, files::kDownloadStatus), format_status_ledger(rep.statuses));
  if (rep.quota_exceeded)
    throw QuotaExceeded(fmt::format("static map quota exhausted after {} download(s); {} pending. "
                                    "Re-run fetch-images to resume.",
                                    rep.downloaded, rep.pending));
  return {{"stage", "fetch-images"}, {"tiles", jobs.size()}, {"downloaded", rep.downloaded},
          {"cached", rep.cached}, {"failed", rep.failed}};
}

nlohmann::ordered_json preprocess(const PipelineConfig& config) {
  const auto raw_root = config.dataset_root / kRawTileDir;
  require(raw_root, "fetch-images");
  const auto out_root = config.dataset_root / kImageDir;
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::recursive_directory_iterator(raw_root))
    if (entry.is_regular_file() && entry.path().extension() == ".png") inputs.push_back(entry.path());
  std::sort(inputs.begin(), inputs.end());

  std::size_t written = 0, skipped = 0;
  std::vector<std::string> rejected;
  for (const auto& in : inputs) {
    const auto target = out_root / fs::relative(in, raw_root);
    if (fs::exists(target)) {
      ++skipped;
      continue;
    }
    try {
      const auto cropped = xwalk::preprocess(decode_png(io::read_file(in)));
      io::write_file_atomic(target, encode_png(cropped));
      ++written;
    } catch (const Error& e) {
      rejected.push_back(fs::relative(in, raw_root).generic_string() + ": " + e.what());
    }
  }
  if (!rejected.empty())
    throw ShapeError(fmt::format("{} tile(s) could not be preprocessed, first: {}", rejected.size(), rejected.front()));
  return {{"stage", "preprocess"}, {"written", written}, {"skipped", skipped}};
}

nlohmann::ordered_json build_manifest(const PipelineConfig& config) {
  config.validate();
  auto records = collect_samples(load_crosswalks(config), load_negatives(config), config.locality);
  const auto ledger = parse_status_ledger(
      io::read_file(require(in_root(config, files::kDownloadStatus), "fetch-images")));
  std::map<std::string, std::string> status_of;
  for (const auto& s : ledger) status_of[s.id] = s.status;

  std::size_t available = 0;
  for (auto& r : records) {
    auto it = status_of.find(r.id);
    const std::string ledger_status = it == status_of.end() ? "pending" : it->second;
    if (ledger_status == "downloaded" || ledger_status == "cached") {
      r.status = fs::exists(config.dataset_root / r.image_path) ? "available" : "pending";
    } else {
      r.status = ledger_status;
    }
    if (r.status == "available") ++available;
  }

  Manifest m;
  m.name = manifest_name(config);
  m.records = std::move(records);
  m.provenance["tool_version"] = kToolVersion;
  m.provenance["regions"] = regions_json(config.load_regions());
  m.provenance["spacing"] = config.spacing;
  m.provenance["d_min"] = config.d_min;
  m.provenance["d_max"] = config.d_max;
  m.provenance["zoom"] = config.zoom;
  write_manifest(in_root(config, files::kManifest), m);

  const auto positives = static_cast<std::size_t>(std::count_if(
      m.records.begin(), m.records.end(), [](const auto& r) { return r.label == Label::crosswalk; }));
  return {{"stage", "build-manifest"}, {"name", m.name}, {"records", m.records.size()},
          {"crosswalk", positives}, {"no_crosswalk", m.records.size() - positives},
          {"available", available}};
}

nlohmann::ordered_json split(const PipelineConfig& config, std::optional<fs::path> input,
                             std::optional<fs::path> output) {
  const auto in = input.value_or(in_root(config, files::kManifest));
  const auto out = output.value_or(in_root(config, files::kSplitManifest));
  if (fs::exists(in) && fs::exists(out) && fs::equivalent(in, out))
    throw ConfigError("split output must differ from its input manifest");
  auto m = assign_splits(read_manifest(require(in, "build-manifest")), config.split_ratios, config.seed);
  write_manifest(out, m);
  std::size_t train = 0, val = 0, test = 0;
  for (const auto& r : m.records) {
    train += r.split == Split::train;
    val += r.split == Split::val;
    test += r.split == Split::test;
  }
  return {{"stage", "split"}, {"output", out.string()}, {"train", train}, {"val", val}, {"test", test}};
}

nlohmann::ordered_json make_experiment(const std::string& protocol, const fs::path& train_val,
                                       const fs::path& test, const fs::path& output) {
  const auto spec = xwalk::make_experiment(parse_protocol(protocol), read_manifest(train_val), read_manifest(test));
  io::write_file_atomic(output, format_experiment(spec));
  return nlohmann::ordered_json::parse(format_experiment(spec));
}

nlohmann::ordered_json evaluate(const EvaluateArgs& args) {
  const auto spec = parse_experiment(io::read_file(require(args.experiment, "make-experiment")));
  if (!fs::exists(args.predictions))
    throw InputError("predictions file not found: " + args.predictions.string());
  const auto test = read_manifest(args.test_manifest);
  if (args.train_manifest) check_exclusivity(spec, read_manifest(*args.train_manifest), test);
  const auto predictions = parse_predictions(io::read_file(args.predictions));
  auto j = to_json(report(spec, test, predictions, args.threshold));
  if (args.output) io::write_file_atomic(*args.output, j.dump(2) + "\n");
  return j;
}

nlohmann::ordered_json audit(const fs::path& manifest, std::size_t n, std::uint64_t seed, const fs::path& output) {
  const auto rows = audit_sample(read_manifest(manifest), n, seed);
  io::write_file_atomic(output, format_worksheet(rows));
  return {{"stage", "audit"}, {"rows", rows.size()}, {"output", output.string()}};
}

nlohmann::ordered_json annotation_error(const fs::path& worksheet, std::optional<fs::path> output) {
  if (!fs::exists(worksheet)) throw InputError("worksheet not found: " + worksheet.string());
  auto j = to_json(xwalk::annotation_error(parse_worksheet(io::read_file(worksheet))));
  if (output) io::write_file_atomic(*output, j.dump(2) + "\n");
  return j;
}

}  // namespace xwalk::pipeline
