#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gadsel {

// Shortest round-trip decimal form of a double (via std::to_chars).
// Infinities print as "inf"/"-inf" so CSV output stays deterministic.
std::string format_double(double v);

// FNV-1a over a byte stream, used for content hashes and cache keys.
class Fnv1a {
public:
    void update(const void* data, std::size_t len);
    void update_u64(std::uint64_t v);
    void update_double(double v);
    void update_string(const std::string& s);
    std::uint64_t digest() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ull;
};

double mean_of(const std::vector<double>& v);

}  // namespace gadsel
