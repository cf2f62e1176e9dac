#pragma once

#include <iostream>
#include <string_view>

namespace rdfc::log {

enum class Level { kDebug = 0, kInfo, kWarn, kError, kOff };

inline Level& threshold() {
  static Level level = Level::kInfo;
  return level;
}

inline void set_level(Level l) { threshold() = l; }

inline void write(Level l, std::string_view tag, std::string_view msg) {
  if (l < threshold()) return;
  std::clog << '[' << tag << "] " << msg << '\n';
}

inline void debug(std::string_view msg) { write(Level::kDebug, "debug", msg); }
inline void info(std::string_view msg) { write(Level::kInfo, "info", msg); }
inline void warn(std::string_view msg) { write(Level::kWarn, "warn", msg); }
inline void error(std::string_view msg) { write(Level::kError, "error", msg); }

}  // namespace rdfc::log
