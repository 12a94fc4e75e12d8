#include "chainsim/util.hpp"

#include <cctype>

namespace chainsim {

std::string to_hex(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

bool find_first_integer(std::string_view text, long long& out) {
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        bool negative = false;
        size_t start = i;
        if (text[i] == '-' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
            negative = true;
            ++i;
        }
        if (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
            long long value = 0;
            bool overflow = false;
            while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
                int digit = text[i] - '0';
                if (value > (1ll << 40)) overflow = true; // saturate, callers clamp anyway
                if (!overflow) value = value * 10 + digit;
                ++i;
            }
            out = negative ? -value : value;
            return true;
        }
        i = start + 1;
    }
    return false;
}

bool find_marker_value(std::string_view text, std::string_view marker, long long& out) {
    size_t pos = text.find(marker);
    if (pos == std::string_view::npos) return false;
    return find_first_integer(text.substr(pos + marker.size()), out);
}

} // namespace chainsim
