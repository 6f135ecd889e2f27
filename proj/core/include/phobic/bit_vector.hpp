#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

namespace phobic {

/// Plain growable bit vector, LSB-first within 64-bit words.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(uint64_t size) : words_((size + 63) / 64, 0), size_(size) {}

    uint64_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    std::span<const uint64_t> words() const { return words_; }

    bool get(uint64_t pos) const {
        assert(pos < size_);
        return (words_[pos >> 6] >> (pos & 63)) & 1;
    }

    void set(uint64_t pos, bool value = true) {
        assert(pos < size_);
        uint64_t mask = uint64_t(1) << (pos & 63);
        if (value) {
            words_[pos >> 6] |= mask;
        } else {
            words_[pos >> 6] &= ~mask;
        }
    }

    /// Reads `width` bits (0..64) starting at `pos`.
    uint64_t get_bits(uint64_t pos, unsigned width) const {
        if (width == 0) return 0;
        uint64_t block = pos >> 6;
        unsigned shift = pos & 63;
        uint64_t mask = width == 64 ? ~uint64_t(0) : (uint64_t(1) << width) - 1;
        uint64_t v = words_[block] >> shift;
        if (shift + width > 64) {
            v |= words_[block + 1] << (64 - shift);
        }
        return v & mask;
    }

    void set_bits(uint64_t pos, uint64_t value, unsigned width) {
        if (width == 0) return;
        assert(pos + width <= size_);
        uint64_t mask = width == 64 ? ~uint64_t(0) : (uint64_t(1) << width) - 1;
        value &= mask;
        uint64_t block = pos >> 6;
        unsigned shift = pos & 63;
        words_[block] = (words_[block] & ~(mask << shift)) | (value << shift);
        if (shift + width > 64) {
            unsigned done = 64 - shift;
            uint64_t hmask = mask >> done;
            words_[block + 1] = (words_[block + 1] & ~hmask) | (value >> done);
        }
    }

    void push_back(bool bit) {
        if ((size_ & 63) == 0) words_.push_back(0);
        if (bit) words_[size_ >> 6] |= uint64_t(1) << (size_ & 63);
        ++size_;
    }

    void append_bits(uint64_t value, unsigned width) {
        uint64_t pos = size_;
        resize(size_ + width);
        set_bits(pos, value, width);
    }

    void resize(uint64_t size) {
        words_.resize((size + 63) / 64, 0);
        size_ = size;
        clear_tail();
    }

    void clear() {
        words_.clear();
        size_ = 0;
    }

    /// Zeroes every bit, keeping the size.
    void reset() { std::fill(words_.begin(), words_.end(), 0); }

    uint64_t count_ones() const {
        uint64_t c = 0;
        for (uint64_t w : words_) c += std::popcount(w);
        return c;
    }

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    void clear_tail() {
        if (size_ & 63) words_.back() &= (uint64_t(1) << (size_ & 63)) - 1;
    }

    std::vector<uint64_t> words_;
    uint64_t size_ = 0;
};

/// Position of the k-th (0-based) set bit of `word`. Requires popcount(word) > k.
inline unsigned select_in_word(uint64_t word, unsigned k) {
    for (unsigned i = 0; i < k; ++i) word &= word - 1;
    return static_cast<unsigned>(std::countr_zero(word));
}

/// select1 over an immutable bit vector. Stores the position of the set bit
/// of rank 1024 t for t >= 1 and scans forward from the nearest sample; rank
/// 0 needs no sample since its scan starts at bit 0.
class SelectIndex {
public:
    static constexpr uint64_t kSampleRate = 1024;

    SelectIndex() = default;
    explicit SelectIndex(const BitVector& bits);
    SelectIndex(const BitVector& bits, std::vector<uint64_t> samples);

    /// Position of the (k+1)-th set bit; k must be below the number of ones.
    uint64_t select1(const BitVector& bits, uint64_t k) const {
        uint64_t sample = k / kSampleRate;
        uint64_t pos = sample == 0 ? 0 : samples_[sample - 1];
        uint64_t remaining = k % kSampleRate;
        auto words = bits.words();
        uint64_t block = pos >> 6;
        // Ones at or after `pos` in its word.
        uint64_t w = words[block] & (~uint64_t(0) << (pos & 63));
        for (;;) {
            auto c = static_cast<uint64_t>(std::popcount(w));
            if (remaining < c) {
                return (block << 6) + select_in_word(w, static_cast<unsigned>(remaining));
            }
            remaining -= c;
            w = words[++block];
        }
    }

    const std::vector<uint64_t>& samples() const { return samples_; }
    uint64_t num_ones() const { return ones_; }

    static std::vector<uint64_t> compute_samples(const BitVector& bits);

private:
    std::vector<uint64_t> samples_;
    uint64_t ones_ = 0;
};

} // namespace phobic
