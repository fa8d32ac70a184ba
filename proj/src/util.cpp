#include "gadsel/util.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace gadsel {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void Fnv1a::update(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        state_ ^= p[i];
        state_ *= 0x100000001b3ull;
    }
}

void Fnv1a::update_u64(std::uint64_t v) { update(&v, sizeof(v)); }

void Fnv1a::update_double(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    update_u64(bits);
}

void Fnv1a::update_string(const std::string& s) {
    update_u64(s.size());
    update(s.data(), s.size());
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean of empty vector");
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
}

}  // namespace gadsel
