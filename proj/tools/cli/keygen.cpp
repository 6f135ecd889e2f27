#include "cli/keygen.hpp"

#include <random>
#include <string_view>
#include <unordered_set>

namespace phobic::cli {

std::vector<std::string> gen_keys(uint64_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> length(kMinKeyLength, kMaxKeyLength);
    std::uniform_int_distribution<int> printable(0x20, 0x7e);

    auto make = [&] {
        std::string key(length(rng), '\0');
        for (char& c : key) c = static_cast<char>(printable(rng));
        return key;
    };

    std::vector<std::string> keys;
    keys.reserve(n);
    std::unordered_set<std::string_view> seen;
    seen.reserve(n);
    while (keys.size() < n) {
        keys.push_back(make());
        // Views stay valid: the vector never reallocates after reserve.
        if (!seen.insert(keys.back()).second) keys.pop_back();
    }
    return keys;
}

} // namespace phobic::cli
