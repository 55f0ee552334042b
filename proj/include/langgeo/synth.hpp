#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "langgeo/binarizer.hpp"
#include "langgeo/clustering.hpp"

namespace langgeo {

/// Planted-family generator: a random root, one prototype per family at
/// flip rate p_proto from the root, members at flip rate p_member from their
/// prototype.
struct SyntheticSpec {
    int families = 4;
    int members_per_family = 8;
    std::size_t bits = 65536;
    double p_proto = 0.25;
    double p_member = 0.02;
    std::uint64_t seed = 0;
    /// Independent draws of the whole hierarchy, one per simulated
    /// (model, corpus) run. Family membership is shared.
    int runs = 1;
    std::string model_prefix = "synth-model";
    std::string corpus_prefix = "synth-corpus";
};

void validate(const SyntheticSpec& spec);

struct SyntheticData {
    std::vector<std::vector<BinaryLanguageVector>> runs;
    LabeledPartition truth;
};

SyntheticData synth_generate(const SyntheticSpec& spec);

/// Flips each bit independently with probability p (geometric gap sampling).
void flip_bits(BitVector& bits, double p, std::mt19937_64& rng);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Language tag used by the generator: "f<family>_m<member>".
std::string synthetic_language(int family, int member);

} // namespace langgeo
