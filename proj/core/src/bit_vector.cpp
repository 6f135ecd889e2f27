#include "phobic/bit_vector.hpp"

#include <algorithm>

namespace phobic {

std::vector<uint64_t> SelectIndex::compute_samples(const BitVector& bits) {
    std::vector<uint64_t> samples;
    uint64_t seen = 0;
    auto words = bits.words();
    for (uint64_t block = 0; block < words.size(); ++block) {
        uint64_t w = words[block];
        auto c = static_cast<uint64_t>(std::popcount(w));
        // Next sampled rank that falls into this word, if any.
        uint64_t next = std::max<uint64_t>(kSampleRate, (seen + kSampleRate - 1) / kSampleRate * kSampleRate);
        while (next < seen + c) {
            samples.push_back((block << 6) + select_in_word(w, static_cast<unsigned>(next - seen)));
            next += kSampleRate;
        }
        seen += c;
    }
    return samples;
}

SelectIndex::SelectIndex(const BitVector& bits)
    : samples_(compute_samples(bits)), ones_(bits.count_ones()) {}

SelectIndex::SelectIndex(const BitVector& bits, std::vector<uint64_t> samples)
    : samples_(std::move(samples)), ones_(bits.count_ones()) {}

} // namespace phobic
