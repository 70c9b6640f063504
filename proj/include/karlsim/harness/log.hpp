#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

/* Logging to stderr, gated by the SIM_LOG environment variable:
 * error | warn | info | debug (or 0..3). Default: warn. */

namespace karlsim::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline Level threshold() {
    static const Level level = [] {
        const char* env = std::getenv("SIM_LOG");
        if (!env) return Level::Warn;
        const std::string v(env);
        if (v == "error" || v == "0") return Level::Error;
        if (v == "warn" || v == "1") return Level::Warn;
        if (v == "info" || v == "2") return Level::Info;
        if (v == "debug" || v == "3") return Level::Debug;
        return Level::Warn;
    }();
    return level;
}

inline void write(Level lv, const char* tag, const std::string& msg) {
    if (static_cast<int>(lv) <= static_cast<int>(threshold()))
        std::fprintf(stderr, "[sim %s] %s\n", tag, msg.c_str());
}

inline void error(const std::string& msg) { write(Level::Error, "error", msg); }
inline void warn(const std::string& msg) { write(Level::Warn, "warn", msg); }
inline void info(const std::string& msg) { write(Level::Info, "info", msg); }
inline void debug(const std::string& msg) { write(Level::Debug, "debug", msg); }

}  // namespace karlsim::log
