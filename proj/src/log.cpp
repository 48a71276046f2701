#include "xwalk/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace xwalk::log {

namespace {
std::atomic<Level> g_level{Level::warn};
std::mutex g_mutex;

void emit(std::string_view tag, std::string_view message) {
  std::lock_guard lock(g_mutex);
  std::clog << "[xwalk " << tag << "] " << message << '\n';
}
}  // namespace

void set_level(Level level) noexcept { g_level = level; }
Level level() noexcept { return g_level; }

void warn(std::string_view message) {
  if (g_level.load() >= Level::warn) emit("warn", message);
}

void info(std::string_view message) {
  if (g_level.load() >= Level::info) emit("info", message);
}

}  // namespace xwalk::log
