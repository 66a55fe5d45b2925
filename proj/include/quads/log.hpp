#pragma once

#include <functional>
#include <iostream>
#include <string_view>

namespace quads {

enum class LogLevel { debug = 0, info = 1, warning = 2 };

struct LogConfig {
    LogLevel threshold = LogLevel::warning;
    std::function<void(LogLevel, std::string_view)> sink = [](LogLevel, std::string_view msg) {
        std::clog << msg << '\n';
    };
};

inline LogConfig& log_config() {
    static LogConfig config;
    return config;
}

inline void log(LogLevel level, std::string_view msg) {
    auto& cfg = log_config();
    if (level >= cfg.threshold && cfg.sink) {
        cfg.sink(level, msg);
    }
}

}  // namespace quads
