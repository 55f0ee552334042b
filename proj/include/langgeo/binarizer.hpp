#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "langgeo/bits.hpp"
#include "langgeo/error.hpp"
#include "langgeo/importance.hpp"

namespace langgeo {

struct LayerBlock {
    std::int64_t layer_id = 0;
    std::uint64_t start_bit = 0;
    std::uint64_t bit_length = 0;

    friend bool operator==(const LayerBlock&, const LayerBlock&) = default;
};

struct VectorTags {
    std::string language;
    std::string model;
    std::string corpus;
};

/// Indicator vector of above-median weights for one (language, model, corpus).
struct BinaryLanguageVector {
    BitVector bits;
    VectorTags tags;
    std::vector<LayerBlock> layout;

    std::size_t size() const noexcept { return bits.size(); }
    const std::string& language() const noexcept { return tags.language; }
};

bool operator==(const BinaryLanguageVector& a, const BinaryLanguageVector& b);

/// One binarized layer, before assembly.
struct LayerBits {
    std::int64_t layer_id = 0;
    BitVector bits;
};

/// Interpolated median: midpoint of the two central order statistics for
/// even counts. `values` is reordered.
double median_inplace(std::vector<double>& values);

/// bit k = 1 iff values[k] > median(values). `values` is in flattening order.
BitVector threshold_at_median(const std::vector<double>& values);

/// Row-major flattening of a score matrix, then strict median threshold.
template <typename Derived>
BitVector binarize_layer(const Eigen::MatrixBase<Derived>& scores)
{
    if (scores.size() == 0) {
        throw ValidationError("cannot binarize an empty score matrix");
    }
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(scores.size()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        for (Eigen::Index j = 0; j < scores.cols(); ++j) {
            flat.push_back(static_cast<double>(scores(i, j)));
        }
    }
    return threshold_at_median(flat);
}

inline LayerBits binarize_layer(const ImportanceMatrix& scores)
{
    return {scores.layer_id, binarize_layer(scores.data)};
}

/// Concatenates blocks in the given order. Layer ids must be strictly
/// increasing and every block non-empty.
BinaryLanguageVector assemble_vector(const std::vector<LayerBits>& blocks, VectorTags tags);

/// Splits a vector back into its per-layer blocks.
std::vector<LayerBits> disassemble(const BinaryLanguageVector& vector);

/// Checks the layout invariants (contiguous, ordered, sums to size()).
void validate_layout(const BinaryLanguageVector& vector);

} // namespace langgeo
