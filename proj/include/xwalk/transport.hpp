#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace xwalk {

struct HttpRequest {
  std::string method = "GET";
  /// Full URL, including any credential parameters.
  std::string url;
  std::string body;
  std::string content_type;
  /// Text the fixture key is derived from. Never contains credentials.
  std::string fixture_material;
  /// Service directory under the fixture root ("overpass", "directions", "staticmap").
  std::string service;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Sends one request. Implementations throw TransportError when no
/// response could be obtained at all.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// Stable key for a request in fixture mode.
std::string fixture_key(const HttpRequest& request);

/// Replays recorded bodies from `<root>/<service>/<key>.body`; an optional
/// `<key>.status` file holds the HTTP status (default 200). A missing
/// recording is reported as a transport failure. Never touches the network.
class FixtureTransport final : public Transport {
 public:
  explicit FixtureTransport(std::filesystem::path root);
  HttpResponse send(const HttpRequest& request) override;

  std::size_t calls() const noexcept { return calls_.load(); }
  const std::filesystem::path& root() const noexcept { return root_; }

  /// Writes a recording for `request` (used by tests and fixture tooling).
  static void record(const std::filesystem::path& root, const HttpRequest& request,
                     const HttpResponse& response);

 private:
  std::filesystem::path root_;
  std::atomic<std::size_t> calls_{0};
};

/// Real HTTP(S) via cpp-httplib.
class LiveTransport final : public Transport {
 public:
  explicit LiveTransport(std::chrono::seconds timeout = std::chrono::seconds(60));
  HttpResponse send(const HttpRequest& request) override;

 private:
  std::chrono::seconds timeout_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  double multiplier = 2.0;
  bool full_jitter = true;
  std::uint64_t seed = 0;
  /// Injected so tests can run without wall-clock waits.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct SendOutcome {
  HttpResponse response;
  int attempts = 0;
};

/// True for statuses worth retrying: 429 and 5xx.
bool is_retryable_status(int status) noexcept;

/// Retries transport failures and retryable statuses with exponential
/// backoff. Returns the first non-retryable response. After the final
/// attempt a retryable status is returned as-is; a transport failure
/// rethrows the last TransportError.
SendOutcome send_with_retry(Transport& transport, const HttpRequest& request,
                            const RetryPolicy& policy);

/// Spacing-based token bucket (burst 1): successive acquisitions are at
/// least 1/rate seconds apart. rate <= 0 disables limiting.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  void acquire();
  double rate() const noexcept { return rate_; }

 private:
  double rate_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point next_;
};

/// Runs fn(i) for i in [0, n) on at most `workers` threads. The first
/// exception thrown is rethrown after all workers stop; remaining indices
/// are abandoned once a failure is seen.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Minimal URL component encoding (RFC 3986 unreserved set kept).
std::string url_encode(std::string_view text);

}  // namespace xwalk
