#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chainsim {

/// Raised when a configuration value violates its contract.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a metric is mathematically undefined for the given input.
struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised for provider transport failures, replay misses and retry exhaustion.
struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Round half-up to the nearest integer (2.5 -> 3, -2.5 -> -2).
inline int round_half_up(double x) {
    return static_cast<int>(std::floor(x + 0.5));
}

inline int clamp_units(int value, int max_order) {
    if (value < 0) return 0;
    if (value > max_order) return max_order;
    return value;
}

/// FNV-1a 64-bit over a byte string. Stable across platforms and runs.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

/// Scan `text` for the first standalone integer (optional leading minus).
/// Returns true and writes it to `out` when found.
bool find_first_integer(std::string_view text, long long& out);

/// Find `marker` in `text` and parse the integer that follows it.
bool find_marker_value(std::string_view text, std::string_view marker, long long& out);

} // namespace chainsim
