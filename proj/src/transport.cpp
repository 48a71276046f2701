#include "xwalk/transport.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cmath>
#include <exception>
#include <fstream>
#include <random>
#include <thread>

#include "xwalk/error.hpp"
#include "xwalk/io.hpp"

namespace xwalk {

std::string fixture_key(const HttpRequest& request) {
  return io::sha256_hex(request.fixture_material);
}

FixtureTransport::FixtureTransport(std::filesystem::path root) : root_(std::move(root)) {
  if (!std::filesystem::is_directory(root_))
    throw ConfigError("fixture directory does not exist: " + root_.string());
}

HttpResponse FixtureTransport::send(const HttpRequest& request) {
  ++calls_;
  const auto base = root_ / request.service / fixture_key(request);
  auto body_path = base;
  body_path += ".body";
  if (!std::filesystem::exists(body_path))
    throw TransportError("no recorded response for " + request.service + " request " +
                         fixture_key(request).substr(0, 12));
  HttpResponse response{200, io::read_file(body_path)};
  auto status_path = base;
  status_path += ".status";
  if (std::filesystem::exists(status_path))
    response.status = static_cast<int>(io::parse_int(io::trim(io::read_file(status_path)), "fixture status"));
  return response;
}

void FixtureTransport::record(const std::filesystem::path& root, const HttpRequest& request,
                              const HttpResponse& response) {
  const auto base = root / request.service / fixture_key(request);
  auto body_path = base;
  body_path += ".body";
  io::write_file_atomic(body_path, response.body);
  if (response.status != 200) {
    auto status_path = base;
    status_path += ".status";
    io::write_file_atomic(status_path, std::to_string(response.status) + "\n");
  }
}

LiveTransport::LiveTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // /path?query
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("URL without scheme");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResponse LiveTransport::send(const HttpRequest& request) {
  const auto parts = split_url(request.url);
  httplib::Client client(parts.origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  httplib::Result result;
  if (request.method == "POST") {
    result = client.Post(parts.path, request.body,
                         request.content_type.empty() ? "text/plain" : request.content_type);
  } else {
    result = client.Get(parts.path);
  }
  // The URL may carry an API key, so only the service name is reported.
  if (!result)
    throw TransportError(request.service + " request failed: " + httplib::to_string(result.error()));
  return {result->status, result->body};
}

bool is_retryable_status(int status) noexcept { return status == 429 || status >= 500; }

SendOutcome send_with_retry(Transport& transport, const HttpRequest& request,
                            const RetryPolicy& policy) {
  const int attempts = std::max(1, policy.max_attempts);
  std::mt19937_64 rng(policy.seed ^ std::hash<std::string>{}(request.fixture_material));
  auto pause = [&](int attempt) {
    const double cap = static_cast<double>(policy.base_delay.count()) *
                       std::pow(policy.multiplier, attempt - 1);
    double delay = cap;
    if (policy.full_jitter) delay = std::uniform_real_distribution<double>(0.0, cap)(rng);
    const std::chrono::milliseconds wait{static_cast<long long>(delay)};
    if (policy.sleep)
      policy.sleep(wait);
    else
      std::this_thread::sleep_for(wait);
  };
  for (int attempt = 1;; ++attempt) {
    try {
      auto response = transport.send(request);
      if (!is_retryable_status(response.status) || attempt == attempts)
        return {std::move(response), attempt};
    } catch (const TransportError&) {
      if (attempt == attempts) throw;
    }
    pause(attempt);
  }
}

RateLimiter::RateLimiter(double requests_per_second)
    : rate_(requests_per_second), next_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  if (rate_ <= 0.0) return;
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / rate_));
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    slot = std::max(next_, std::chrono::steady_clock::now());
    next_ = slot + interval;
  }
  std::this_thread::sleep_until(slot);
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  workers = std::clamp<std::size_t>(workers, 1, n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const auto i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::string url_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xf]);
    }
  }
  return out;
}

}  // namespace xwalk
