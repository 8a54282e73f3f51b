#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace regrid_uq::log {

enum class Level : int { quiet = 0, info = 1, debug = 2 };

// Verbosity comes from REGRID_UQ_LOG (quiet|info|debug or 0|1|2), read once.
inline Level level() {
    static const Level lvl = [] {
        const char* env = std::getenv("REGRID_UQ_LOG");
        if (env == nullptr) return Level::quiet;
        const std::string v(env);
        if (v == "debug" || v == "2") return Level::debug;
        if (v == "info" || v == "1") return Level::info;
        return Level::quiet;
    }();
    return lvl;
}

template <typename... Args>
void info(Args&&... args) {
    if (level() >= Level::info) {
        std::ostringstream os;
        (os << ... << args);
        std::cerr << "[regrid_uq] " << os.str() << '\n';
    }
}

template <typename... Args>
void debug(Args&&... args) {
    if (level() >= Level::debug) {
        std::ostringstream os;
        (os << ... << args);
        std::cerr << "[regrid_uq:debug] " << os.str() << '\n';
    }
}

}  // namespace regrid_uq::log
