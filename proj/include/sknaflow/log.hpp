#pragma once

#include <string_view>

namespace sknaflow::log {

enum class Level { error, warn, info, debug };

// Reads SKNAFLOW_LOG (error|info|debug); unset or unknown falls back to warn.
void init_from_env();
void set_level(Level level);

void error(std::string_view msg);
void warn(std::string_view msg);
void info(std::string_view msg);
void debug(std::string_view msg);

}  // namespace sknaflow::log
