#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "xwalk/dataset.hpp"
#include "xwalk/directions_client.hpp"
#include "xwalk/error.hpp"
#include "xwalk/geo.hpp"
#include "xwalk/imagery.hpp"
#include "xwalk/io.hpp"
#include "xwalk/metrics.hpp"
#include "xwalk/polyline.hpp"
#include "xwalk/raster.hpp"
#include "xwalk/sampler.hpp"

namespace py = pybind11;
using namespace xwalk;

namespace {

using LatLon = std::pair<double, double>;

std::vector<GeoPoint> to_points(const std::vector<LatLon>& in) {
  std::vector<GeoPoint> out;
  out.reserve(in.size());
  for (const auto& [lat, lon] : in) out.push_back(GeoPoint::checked(lat, lon));
  return out;
}

std::vector<LatLon> to_pairs(const std::vector<GeoPoint>& in) {
  std::vector<LatLon> out;
  out.reserve(in.size());
  for (const auto& p : in) out.emplace_back(p.lat, p.lon);
  return out;
}

BoundingBox to_box(const std::tuple<double, double, double, double>& b) {
  return {std::get<0>(b), std::get<1>(b), std::get<2>(b), std::get<3>(b)};
}

std::tuple<double, double, double, double> from_box(const BoundingBox& b) {
  return {b.south(), b.west(), b.north(), b.east()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "satellite crosswalk dataset toolkit: geometry, codec, sampling, splits and metrics";

  static py::exception<Error> error(m, "XwalkError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (e.kind() + ": " + e.what()).c_str());
    }
  });

  m.def("deg_distance",
        [](LatLon a, LatLon b) { return deg_distance({a.first, a.second}, {b.first, b.second}); });
  m.def("approx_meters",
        [](LatLon a, LatLon b) { return approx_meters({a.first, a.second}, {b.first, b.second}); });
  m.def("split_region",
        [](std::tuple<double, double, double, double> box, double max_extent) {
          std::vector<std::tuple<double, double, double, double>> out;
          for (const auto& b : split_region(to_box(box), max_extent)) out.push_back(from_box(b));
          return out;
        },
        py::arg("box"), py::arg("max_extent") = kDefaultMaxExtent,
        "split (south, west, north, east) into row-major sub-boxes");
  m.def("contains", [](std::tuple<double, double, double, double> box, LatLon p) {
    return contains(to_box(box), {p.first, p.second});
  });

  m.def("decode_polyline", [](const std::string& text) { return to_pairs(polyline::decode(text)); });
  m.def("encode_polyline", [](const std::vector<LatLon>& pts) { return polyline::encode(to_points(pts)); });

  m.def("plan_requests",
        [](const std::vector<LatLon>& ordered, std::size_t max_waypoints) {
          std::vector<std::vector<LatLon>> out;
          for (const auto& r : plan_requests(to_points(ordered), max_waypoints)) out.push_back(to_pairs(r.points()));
          return out;
        },
        py::arg("ordered"), py::arg("max_waypoints") = kMaxWaypoints,
        "point lists (origin, waypoints..., destination) per request");

  m.def("densify", [](const std::vector<LatLon>& path, double spacing) {
    return to_pairs(densify(to_points(path), spacing));
  }, py::arg("path"), py::arg("spacing") = kDefaultSpacing);
  m.def("dedupe", [](const std::vector<LatLon>& pts) { return to_pairs(dedupe(to_points(pts))); });
  m.def("filter_candidates",
        [](const std::vector<LatLon>& candidates, const std::vector<LatLon>& crosswalks,
           std::tuple<double, double, double, double> region, double d_min, double d_max) {
          return to_pairs(filter_candidates(to_points(candidates), to_points(crosswalks), to_box(region),
                                            {d_min, d_max}));
        },
        py::arg("candidates"), py::arg("crosswalks"), py::arg("region"), py::arg("d_min") = kDefaultMinDistance,
        py::arg("d_max") = kDefaultMaxDistance);

  m.def("build_tile_url",
        [](LatLon center, const std::string& api_key, int zoom, int width, int height, const std::string& endpoint) {
          return build_tile_url({{center.first, center.second}, zoom, width, height, "satellite"}, api_key, endpoint);
        },
        py::arg("center"), py::arg("api_key"), py::arg("zoom") = 20, py::arg("width") = 200, py::arg("height") = 225,
        py::arg("endpoint") = std::string(kDefaultStaticMapEndpoint));
  m.def("coverage_meters",
        [](double lat, int zoom, int width, int height) {
          return coverage_meters({{lat, 0.0}, zoom, width, height, "satellite"});
        },
        py::arg("lat"), py::arg("zoom") = 20, py::arg("width") = 200, py::arg("height") = 225);
  m.def("preprocess_png", [](const py::bytes& png) {
    return py::bytes(encode_png(preprocess(decode_png(std::string(png)))));
  }, "crop the logo strip from a 200x225 PNG, returning PNG bytes");

  m.def("split_counts", [](std::size_t n, double train, double val, double test) {
    const auto c = split_counts(n, {train, val, test});
    return std::make_tuple(c.train, c.val, c.test);
  }, py::arg("n"), py::arg("train") = 0.7, py::arg("val") = 0.1, py::arg("test") = 0.2);
  m.def("assign_splits_file",
        [](const std::filesystem::path& in, const std::filesystem::path& out, std::uint64_t seed) {
          write_manifest(out, assign_splits(read_manifest(in), {}, seed));
        },
        py::arg("manifest"), py::arg("output"), py::arg("seed") = 0);

  m.def("confusion_metrics", [](std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
    const ConfusionCounts c{tp, fp, tn, fn};
    return std::make_pair(accuracy(c), f1(c));
  }, py::arg("tp"), py::arg("fp"), py::arg("tn"), py::arg("fn"), "(accuracy, f1)");
  m.def("evaluate_files",
        [](const std::string& experiment_json, const std::filesystem::path& manifest,
           const std::filesystem::path& predictions_csv, std::optional<double> threshold) {
          const auto spec = parse_experiment(experiment_json);
          const auto rep = report(spec, read_manifest(manifest),
                                  parse_predictions(xwalk::io::read_file(predictions_csv)), threshold);
          return to_json(rep).dump();
        },
        py::arg("experiment_json"), py::arg("manifest"), py::arg("predictions"), py::arg("threshold") = py::none(),
        "JSON report text");
}
