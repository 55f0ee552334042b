#include "langgeo/bits.hpp"

#include <cassert>

namespace langgeo {

std::size_t BitVector::count() const noexcept
{
    std::size_t total = 0;
    for (auto w : m_words) {
        total += static_cast<std::size_t>(std::popcount(w));
    }
    return total;
}

BitVector BitVector::operator~() const
{
    BitVector out(*this);
    for (auto& w : out.m_words) {
        w = ~w;
    }
    if (const std::size_t tail = m_size & 63; tail != 0) {
        out.m_words.back() &= (std::uint64_t{1} << tail) - 1;
    }
    return out;
}

void BitVector::push_back(bool value)
{
    if ((m_size & 63) == 0) {
        m_words.push_back(0);
    }
    ++m_size;
    set(m_size - 1, value);
}

void BitVector::append(const BitVector& other)
{
    const std::size_t shift = m_size & 63;
    if (shift == 0) {
        m_words.insert(m_words.end(), other.m_words.begin(), other.m_words.end());
        m_size += other.m_size;
        return;
    }
    const std::size_t new_size = m_size + other.m_size;
    m_words.resize((new_size + 63) / 64, 0);
    std::size_t dst = m_size >> 6;
    for (auto w : other.m_words) {
        m_words[dst] |= w << shift;
        if (dst + 1 < m_words.size()) {
            m_words[dst + 1] |= w >> (64 - shift);
        }
        ++dst;
    }
    m_size = new_size;
}

BitVector BitVector::slice(std::size_t start, std::size_t length) const
{
    assert(start + length <= m_size);
    BitVector out(length);
    const std::size_t shift = start & 63;
    const std::size_t first = start >> 6;
    for (std::size_t k = 0; k < out.m_words.size(); ++k) {
        std::uint64_t w = m_words[first + k] >> shift;
        if (shift != 0 && first + k + 1 < m_words.size()) {
            w |= m_words[first + k + 1] << (64 - shift);
        }
        out.m_words[k] = w;
    }
    if (const std::size_t tail = length & 63; tail != 0) {
        out.m_words.back() &= (std::uint64_t{1} << tail) - 1;
    }
    return out;
}

std::vector<std::uint8_t> BitVector::to_bytes() const
{
    std::vector<std::uint8_t> bytes((m_size + 7) / 8);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        bytes[i] = static_cast<std::uint8_t>(m_words[i >> 3] >> (8 * (i & 7)));
    }
    return bytes;
}

bool BitVector::from_bytes(std::span<const std::uint8_t> bytes, std::size_t size, BitVector& out)
{
    if (bytes.size() != (size + 7) / 8) {
        return false;
    }
    BitVector result(size);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        result.m_words[i >> 3] |= std::uint64_t{bytes[i]} << (8 * (i & 7));
    }
    if (const std::size_t tail = size & 63; tail != 0 && !result.m_words.empty()) {
        if (result.m_words.back() >> tail) {
            return false;
        }
    }
    out = std::move(result);
    return true;
}

std::size_t xor_count(const BitVector& a, const BitVector& b) noexcept
{
    const auto wa = a.words();
    const auto wb = b.words();
    std::size_t total = 0;
    for (std::size_t i = 0; i < wa.size(); ++i) {
        total += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
    }
    return total;
}

std::size_t and_count(const BitVector& a, const BitVector& b) noexcept
{
    const auto wa = a.words();
    const auto wb = b.words();
    std::size_t total = 0;
    for (std::size_t i = 0; i < wa.size(); ++i) {
        total += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
    }
    return total;
}

} // namespace langgeo
