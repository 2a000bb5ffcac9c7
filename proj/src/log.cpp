#include "sfield/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>

namespace sfield::log {
namespace {

constexpr int kOff = -1;

int parse_env() {
  const char* env = std::getenv("SFIELD_LOG");
  if (env == nullptr) return static_cast<int>(Level::warn);
  if (std::strcmp(env, "off") == 0 || std::strcmp(env, "none") == 0) return kOff;
  if (std::strcmp(env, "error") == 0) return static_cast<int>(Level::error);
  if (std::strcmp(env, "info") == 0) return static_cast<int>(Level::info);
  if (std::strcmp(env, "debug") == 0) return static_cast<int>(Level::debug);
  return static_cast<int>(Level::warn);
}

std::atomic<int>& current() {
  static std::atomic<int> value{parse_env()};
  return value;
}

const char* tag(Level level) {
  switch (level) {
    case Level::error: return "error";
    case Level::warn: return "warning";
    case Level::info: return "info";
    case Level::debug: return "debug";
  }
  return "log";
}

}  // namespace

Level threshold() {
  int v = current().load();
  return v < 0 ? Level::error : static_cast<Level>(v);
}

bool enabled(Level level) { return static_cast<int>(level) <= current().load(); }

void set_threshold(Level level) { current().store(static_cast<int>(level)); }

void silence() { current().store(kOff); }

void write(Level level, const std::string& message) {
  if (!enabled(level)) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "sfield " << tag(level) << ": " << message << '\n';
}

}  // namespace sfield::log
