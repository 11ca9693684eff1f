#pragma once

#include <cstdlib>
#include <iostream>
#include <string_view>

namespace gppsrl::log {

// GPPSRL_LOG=debug enables debug output; warnings always go to stderr.
inline bool debug_enabled() {
    static const bool enabled = [] {
        const char* v = std::getenv("GPPSRL_LOG");
        return v != nullptr && std::string_view(v) == "debug";
    }();
    return enabled;
}

template <class... Args>
void debug(const Args&... args) {
    if (!debug_enabled()) return;
    std::cerr << "[debug] ";
    (std::cerr << ... << args) << '\n';
}

template <class... Args>
void warn(const Args&... args) {
    std::cerr << "[warn] ";
    (std::cerr << ... << args) << '\n';
}

}  // namespace gppsrl::log
