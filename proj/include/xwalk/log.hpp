#pragma once

#include <string_view>

namespace xwalk::log {

enum class Level { quiet, warn, info };

void set_level(Level level) noexcept;
Level level() noexcept;

void warn(std::string_view message);
void info(std::string_view message);

}  // namespace xwalk::log
