#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "phobic/bit_vector.hpp"
#include "phobic/errors.hpp"

namespace phobic {

/// Little-endian byte sink used by all serialization code.
class ByteWriter {
public:
    void u8(uint8_t v) { bytes_.push_back(v); }
    void u32(uint32_t v) { put_le(v, 4); }
    void u64(uint64_t v) { put_le(v, 8); }
    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
    void raw(std::span<const uint8_t> data) { bytes_.insert(bytes_.end(), data.begin(), data.end()); }

    /// Appends the first `nbits` bits of `bits`, LSB-first, zero-padded to a byte.
    void bits(const BitVector& bits, uint64_t nbits) {
        auto words = bits.words();
        uint64_t nbytes = (nbits + 7) / 8;
        for (uint64_t b = 0; b < nbytes; ++b) {
            uint64_t w = words[b / 8];
            auto byte = static_cast<uint8_t>(w >> ((b % 8) * 8));
            uint64_t remaining = nbits - b * 8;
            if (remaining < 8) byte &= static_cast<uint8_t>((1u << remaining) - 1);
            bytes_.push_back(byte);
        }
    }

    std::vector<uint8_t>& bytes() { return bytes_; }
    size_t size() const { return bytes_.size(); }

private:
    void put_le(uint64_t v, int n) {
        for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    std::vector<uint8_t> bytes_;
};

/// Bounds-checked little-endian reader; every overrun is a FormatError.
class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() { return static_cast<uint8_t>(get_le(1)); }
    uint8_t peek_u8() const {
        need(1);
        return data_[pos_];
    }
    uint32_t u32() { return static_cast<uint32_t>(get_le(4)); }
    uint64_t u64() { return get_le(8); }
    double f64() { return std::bit_cast<double>(u64()); }

    /// Reads `nbits` bits padded to a whole byte. Non-zero padding is rejected
    /// so that every accepted file has exactly one byte representation.
    BitVector bits(uint64_t nbits) {
        uint64_t nbytes = (nbits + 7) / 8;
        need(nbytes);
        BitVector out(nbits);
        for (uint64_t b = 0; b < nbytes; ++b) {
            uint8_t byte = data_[pos_ + b];
            uint64_t remaining = nbits - b * 8;
            if (remaining < 8 && (byte >> remaining) != 0) {
                throw FormatError("non-zero padding bits");
            }
            out.set_bits(b * 8, byte, remaining < 8 ? static_cast<unsigned>(remaining) : 8);
        }
        pos_ += nbytes;
        return out;
    }

    size_t position() const { return pos_; }
    size_t remaining() const { return data_.size() - pos_; }
    std::span<const uint8_t> rest() const { return data_.subspan(pos_); }

    void need(uint64_t n) const {
        if (n > data_.size() - pos_) throw FormatError("unexpected end of input");
    }

private:
    uint64_t get_le(int n) {
        need(static_cast<uint64_t>(n));
        uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += n;
        return v;
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

} // namespace phobic
