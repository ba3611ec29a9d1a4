#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

namespace stackcast::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3 };

void set_level(Level level);
// Mirrors every message into a file as well as stderr; empty path closes it.
void set_file(const std::filesystem::path& path);

void write(Level level, std::string_view message);
// Messages written so far at a level, filtered or not.
std::size_t count(Level level);

inline void debug(std::string_view m) { write(Level::debug, m); }
inline void info(std::string_view m) { write(Level::info, m); }
inline void warn(std::string_view m) { write(Level::warn, m); }
inline void error(std::string_view m) { write(Level::error, m); }

}  // namespace stackcast::log
