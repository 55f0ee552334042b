#include "langgeo/binarizer.hpp"

#include <cmath>

namespace langgeo {

bool operator==(const BinaryLanguageVector& a, const BinaryLanguageVector& b)
{
    return a.bits == b.bits && a.tags.language == b.tags.language && a.tags.model == b.tags.model
        && a.tags.corpus == b.tags.corpus && a.layout == b.layout;
}

double median_inplace(std::vector<double>& values)
{
    if (values.empty()) {
        throw ValidationError("median of an empty set");
    }
    const std::size_t n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    const double upper = *mid;
    if (n % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), mid);
    return lower + 0.5 * (upper - lower);
}

BitVector threshold_at_median(const std::vector<double>& values)
{
    if (values.empty()) {
        throw ValidationError("cannot binarize an empty score matrix");
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k])) {
            throw ValidationError("non-finite score at flat index " + std::to_string(k));
        }
    }
    std::vector<double> scratch(values);
    const double threshold = median_inplace(scratch);
    BitVector bits(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] > threshold) {
            bits.set(k);
        }
    }
    return bits;
}

BinaryLanguageVector assemble_vector(const std::vector<LayerBits>& blocks, VectorTags tags)
{
    if (blocks.empty()) {
        throw ValidationError("no layer blocks to assemble");
    }
    BinaryLanguageVector out;
    out.tags = std::move(tags);
    std::size_t total = 0;
    for (const auto& block : blocks) {
        total += block.bits.size();
    }
    out.layout.reserve(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& block = blocks[b];
        if (block.bits.empty()) {
            throw ValidationError("layer " + std::to_string(block.layer_id) + " has an empty block");
        }
        if (b > 0 && block.layer_id <= blocks[b - 1].layer_id) {
            throw ValidationError(block.layer_id == blocks[b - 1].layer_id
                                      ? "duplicate layer id " + std::to_string(block.layer_id)
                                      : "layer ids must be strictly increasing");
        }
        out.layout.push_back({block.layer_id, out.bits.size(), block.bits.size()});
        out.bits.append(block.bits);
    }
    return out;
}

std::vector<LayerBits> disassemble(const BinaryLanguageVector& vector)
{
    validate_layout(vector);
    std::vector<LayerBits> blocks;
    blocks.reserve(vector.layout.size());
    for (const auto& entry : vector.layout) {
        blocks.push_back({entry.layer_id, vector.bits.slice(entry.start_bit, entry.bit_length)});
    }
    return blocks;
}

void validate_layout(const BinaryLanguageVector& vector)
{
    std::uint64_t cursor = 0;
    for (std::size_t b = 0; b < vector.layout.size(); ++b) {
        const auto& entry = vector.layout[b];
        if (entry.start_bit != cursor) {
            throw ValidationError("layer block " + std::to_string(b) + " is not contiguous");
        }
        if (entry.bit_length == 0) {
            throw ValidationError("layer block " + std::to_string(b) + " is empty");
        }
        if (b > 0 && entry.layer_id <= vector.layout[b - 1].layer_id) {
            throw ValidationError("layer ids must be strictly increasing");
        }
        cursor += entry.bit_length;
    }
    if (cursor != vector.bits.size()) {
        throw ValidationError("layout covers " + std::to_string(cursor) + " bits but the vector has "
                              + std::to_string(vector.bits.size()));
    }
}

} // namespace langgeo
