#include "stackcast/common/log.hpp"

#include <fstream>
#include <iostream>
#include <mutex>

namespace stackcast::log {

namespace {

std::mutex g_mutex;
Level g_level = Level::info;
std::ofstream g_file;
std::size_t g_counts[4] = {0, 0, 0, 0};

const char* tag(Level l) {
    switch (l) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warn: return "warn";
        case Level::error: return "error";
    }
    return "?";
}

}  // namespace

void set_level(Level level) {
    std::lock_guard lock(g_mutex);
    g_level = level;
}

void set_file(const std::filesystem::path& path) {
    std::lock_guard lock(g_mutex);
    if (g_file.is_open()) g_file.close();
    if (!path.empty()) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        g_file.open(path, std::ios::app);
    }
}

void write(Level level, std::string_view message) {
    std::lock_guard lock(g_mutex);
    ++g_counts[int(level)];
    if (g_file.is_open()) g_file << '[' << tag(level) << "] " << message << '\n';
    if (level < g_level) return;
    std::cerr << '[' << tag(level) << "] " << message << '\n';
}

std::size_t count(Level level) {
    std::lock_guard lock(g_mutex);
    return g_counts[int(level)];
}

}  // namespace stackcast::log
