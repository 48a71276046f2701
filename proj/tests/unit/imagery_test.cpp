#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "xwalk/error.hpp"
#include "xwalk/imagery.hpp"
#include "xwalk/io.hpp"
#include "xwalk/raster.hpp"

namespace xwalk {
namespace {

using testing::MockTransport;
using testing::TempDir;

RasterImage gradient(int w, int h) {
  RasterImage img(w, h);
  for (int y = 0; y < h; ++y) {
    auto row = img.row(y);
    for (int x = 0; x < w; ++x) {
      row[3 * x] = static_cast<std::uint8_t>(x);
      row[3 * x + 1] = static_cast<std::uint8_t>(y);
      row[3 * x + 2] = static_cast<std::uint8_t>((x * 7 + y * 3) & 0xff);
    }
  }
  return img;
}

TEST(TileUrl, Examples) {
  const TileSpec tile{{0, 0}};
  const auto url = build_tile_url(tile, "K");
  const std::string tail = "center=0.0000000,0.0000000&zoom=20&size=200x225&maptype=satellite&key=K";
  ASSERT_GE(url.size(), tail.size());
  EXPECT_EQ(url.substr(url.size() - tail.size()), tail);
  EXPECT_EQ(url, tile_url_without_key(tile) + "&key=K");
  EXPECT_NE(url.find("zoom=20"), std::string::npos);
  EXPECT_NE(url.find("size=200x225"), std::string::npos);

  TileSpec bad{{0, 0}};
  bad.zoom = 22;
  EXPECT_THROW(build_tile_url(bad, "K"), GeoError);
  bad.zoom = 20;
  bad.width_px = 641;
  EXPECT_THROW(bad.validate(), GeoError);
}

TEST(Coverage, Examples) {
  const auto [w_ny, h_ny] = coverage_meters(TileSpec{{40.78, -73.97}});
  EXPECT_NEAR(w_ny, 22.6, 2.0);
  EXPECT_NEAR(h_ny, 25.4, 2.0);
  const auto [w0, h0] = coverage_meters(TileSpec{{0, 0}});
  EXPECT_NEAR(w0, 29.9, 0.05);
  EXPECT_NEAR(h0, 33.6, 0.05);
  TileSpec world{{0, 0}, 0, 256, 256};
  EXPECT_NEAR(coverage_meters(world).first / 1000.0, 40075.0, 1.0);
  EXPECT_THROW(coverage_meters(TileSpec{{85.0, 0}}), ProjectionError);
}

TEST(Coverage, MatchesIndependentFormula) {
  for (double lat = -84; lat <= 84; lat += 3.5)
    for (int z = 0; z <= 21; ++z) {
      const double oracle = 2 * std::numbers::pi * 6378137.0 * std::cos(lat * std::numbers::pi / 180) /
                            (256.0 * std::pow(2.0, z));
      EXPECT_NEAR(ground_resolution(lat, z), oracle, 1e-6 * oracle + 1e-12);
    }
}

TEST(Raster, PngRoundTripAndPreprocess) {
  const auto img = gradient(200, 225);
  const auto decoded = decode_png(encode_png(img));
  EXPECT_EQ(decoded, img);
  const auto cropped = preprocess(img);
  ASSERT_EQ(cropped.width(), 200);
  ASSERT_EQ(cropped.height(), 200);
  for (int y = 0; y < 200; ++y) {
    const auto a = cropped.row(y);
    const auto b = img.row(y);
    ASSERT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  }
  EXPECT_THROW(preprocess(gradient(200, 200)), ShapeError);
  EXPECT_THROW(preprocess(gradient(201, 225)), ShapeError);
  EXPECT_THROW(decode_png("not a png"), ImageError);
  EXPECT_THROW(decode_png(""), ImageError);
}

TEST(FetchImages, FailuresAreRecordedPerTile) {
  TempDir dir;
  std::vector<TileJob> jobs;
  for (int i = 0; i < 5; ++i) {
    const GeoPoint c{0.001 * i, 0.0};
    jobs.push_back({"t" + std::to_string(i), c, tile_relative_path("crosswalk", c)});
  }
  const auto bad_url = tile_url_without_key(TileSpec{jobs[3].center}) + "&key=K";
  MockTransport t([&](const HttpRequest& req) {
    if (req.url == bad_url) return HttpResponse{404, ""};
    return HttpResponse{200, "png:" + req.fixture_material};
  });
  FetchImagesOptions opts;
  opts.api_key = "K";
  opts.retry = testing::instant_retry();
  opts.requests_per_second = 0;
  const auto report = fetch_images(jobs, dir.path(), t, opts);
  EXPECT_EQ(report.downloaded, 4u);
  EXPECT_EQ(report.failed, 1u);
  EXPECT_EQ(report.statuses[3].status.rfind("failed", 0), 0u);
  EXPECT_FALSE(std::filesystem::exists(dir.path() / jobs[3].relative_path));
  EXPECT_EQ(io::read_file(dir.path() / jobs[0].relative_path), "png:" + tile_url_without_key(TileSpec{jobs[0].center}));

  MockTransport again([](const HttpRequest&) { return HttpResponse{200, "x"}; });
  std::vector<TileJob> done(jobs.begin(), jobs.begin() + 3);
  const auto rerun = fetch_images(done, dir.path(), again, opts);
  EXPECT_EQ(rerun.cached, 3u);
  EXPECT_EQ(again.calls(), 0u);

  const auto empty = fetch_images({}, dir.path(), again, opts);
  EXPECT_TRUE(empty.statuses.empty());
}

TEST(FetchImages, RespectsConcurrencyAndRate) {
  TempDir dir;
  std::vector<TileJob> jobs;
  for (int i = 0; i < 24; ++i) {
    const GeoPoint c{0.0, 0.0001 * i};
    jobs.push_back({"t" + std::to_string(i), c, tile_relative_path("no_crosswalk", c)});
  }
  MockTransport t([](const HttpRequest&) { return HttpResponse{200, "img"}; }, std::chrono::milliseconds(30));
  FetchImagesOptions opts;
  opts.retry = testing::instant_retry();
  opts.concurrency = 3;
  opts.requests_per_second = 100.0;
  const auto report = fetch_images(jobs, dir.path(), t, opts);
  EXPECT_EQ(report.downloaded, 24u);
  EXPECT_LE(t.max_in_flight(), 3);
  EXPECT_GE(t.max_in_flight(), 2);
  auto starts = t.start_times();
  std::sort(starts.begin(), starts.end());
  // 24 starts at >= 10 ms spacing span at least 230 ms (small scheduler slack).
  EXPECT_GE(starts.back() - starts.front(), std::chrono::milliseconds(220));
}

TEST(FetchImages, QuotaStopsAndLeavesPending) {
  TempDir dir;
  std::vector<TileJob> jobs;
  for (int i = 0; i < 10; ++i) {
    const GeoPoint c{0.0, 0.0001 * i};
    jobs.push_back({"t" + std::to_string(i), c, tile_relative_path("crosswalk", c)});
  }
  std::atomic<int> served{0};
  MockTransport t([&](const HttpRequest&) {
    if (served++ >= 4) return HttpResponse{403, "quota"};
    return HttpResponse{200, "img"};
  });
  FetchImagesOptions opts;
  opts.retry = testing::instant_retry();
  opts.concurrency = 1;
  opts.requests_per_second = 0;
  const auto report = fetch_images(jobs, dir.path(), t, opts);
  EXPECT_TRUE(report.quota_exceeded);
  EXPECT_EQ(report.downloaded, 4u);
  EXPECT_EQ(report.pending, 6u);
  EXPECT_EQ(t.calls(), 5u);
  for (int i = 4; i < 10; ++i) EXPECT_EQ(report.statuses[i].status, "pending");
}

TEST(StatusLedger, RoundTrip) {
  const std::vector<DownloadStatus> rows{{"a", "downloaded", 10, 1}, {"b", "failed:http_404", 0, 1},
                                         {"c", "pending", 0, 0}};
  const auto parsed = parse_status_ledger(format_status_ledger(rows));
  ASSERT_EQ(parsed.size(), 3u);
  EXPECT_EQ(parsed[1].status, "failed:http_404");
  EXPECT_EQ(parsed[0].bytes, 10u);
}

}  // namespace
}  // namespace xwalk
