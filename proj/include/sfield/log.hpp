#pragma once

#include <string>

namespace sfield::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Threshold is read once from SFIELD_LOG (error|warn|info|debug|off);
// default is warn.
Level threshold();
bool enabled(Level level);
void set_threshold(Level level);
void silence();

void write(Level level, const std::string& message);

inline void warn(const std::string& m) { write(Level::warn, m); }
inline void info(const std::string& m) { write(Level::info, m); }
inline void debug(const std::string& m) { write(Level::debug, m); }

}  // namespace sfield::log
