#include "sknaflow/log.hpp"

#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace sknaflow::log {

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> instance;
  std::call_once(once, [] {
    instance = spdlog::stderr_color_mt("sknaflow");
    instance->set_pattern("[%l] %v");
    instance->set_level(spdlog::level::warn);
  });
  return instance;
}

}  // namespace

void set_level(Level level) {
  switch (level) {
    case Level::error: logger()->set_level(spdlog::level::err); break;
    case Level::warn: logger()->set_level(spdlog::level::warn); break;
    case Level::info: logger()->set_level(spdlog::level::info); break;
    case Level::debug: logger()->set_level(spdlog::level::debug); break;
  }
}

void init_from_env() {
  const char* env = std::getenv("SKNAFLOW_LOG");
  const std::string value = env ? env : "";
  if (value == "error") set_level(Level::error);
  else if (value == "info") set_level(Level::info);
  else if (value == "debug") set_level(Level::debug);
  else set_level(Level::warn);
}

void error(std::string_view msg) { logger()->error("{}", msg); }
void warn(std::string_view msg) { logger()->warn("{}", msg); }
void info(std::string_view msg) { logger()->info("{}", msg); }
void debug(std::string_view msg) { logger()->debug("{}", msg); }

}  // namespace sknaflow::log
