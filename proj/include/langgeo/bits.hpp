#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace langgeo {

/// Fixed-length packed bit sequence. Bit i lives in word i / 64 at position
/// i % 64, so the little-endian byte image is LSB-first in vector order.
/// Padding bits past size() are always zero.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t size) : m_words((size + 63) / 64, 0), m_size(size) {}

    std::size_t size() const noexcept { return m_size; }
    bool empty() const noexcept { return m_size == 0; }

    bool test(std::size_t i) const noexcept { return (m_words[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool value = true) noexcept
    {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (value) {
            m_words[i >> 6] |= mask;
        } else {
            m_words[i >> 6] &= ~mask;
        }
    }
    void flip(std::size_t i) noexcept { m_words[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    /// Number of set bits.
    std::size_t count() const noexcept;

    /// Complement within size(); padding stays zero.
    BitVector operator~() const;

    std::span<const std::uint64_t> words() const noexcept { return m_words; }

    void push_back(bool value);
    void append(const BitVector& other);
    BitVector slice(std::size_t start, std::size_t length) const;

    /// ceil(size()/8) bytes, LSB-first within each byte.
    std::vector<std::uint8_t> to_bytes() const;
    /// Inverse of to_bytes(). Set bits beyond `size` in the last byte are
    /// rejected by returning false.
    static bool from_bytes(std::span<const std::uint8_t> bytes, std::size_t size, BitVector& out);

    friend bool operator==(const BitVector& a, const BitVector& b) = default;

private:
    std::vector<std::uint64_t> m_words;
    std::size_t m_size = 0;
};

/// popcount(a XOR b); sizes must match (checked by callers).
std::size_t xor_count(const BitVector& a, const BitVector& b) noexcept;
/// popcount(a AND b)
std::size_t and_count(const BitVector& a, const BitVector& b) noexcept;

} // namespace langgeo
