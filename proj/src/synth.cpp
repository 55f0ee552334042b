#include "langgeo/synth.hpp"

#include <cmath>

namespace langgeo {

void validate(const SyntheticSpec& spec)
{
    if (spec.families < 1 || spec.members_per_family < 1 || spec.runs < 1) {
        throw ValidationError("synthetic spec needs at least one family, member and run");
    }
    if (spec.bits < 64) {
        throw ValidationError("synthetic vectors need at least 64 bits");
    }
    if (!(spec.p_member >= 0.0 && spec.p_member < spec.p_proto && spec.p_proto <= 0.5)) {
        throw ValidationError("flip rates must satisfy 0 <= p_member < p_proto <= 0.5");
    }
}

void flip_bits(BitVector& bits, double p, std::mt19937_64& rng)
{
    if (p <= 0.0) {
        return;
    }
    const double log_keep = std::log1p(-p);
    auto gap = [&] {
        const double u = 1.0 - unit_uniform(rng); // (0, 1]
        return static_cast<std::size_t>(std::floor(std::log(u) / log_keep));
    };
    for (std::size_t i = gap(); i < bits.size(); i += 1 + gap()) {
        bits.flip(i);
    }
}

std::string synthetic_language(int family, int member)
{
    return "f" + std::to_string(family) + "_m" + std::to_string(member);
}

SyntheticData synth_generate(const SyntheticSpec& spec)
{
    validate(spec);
    SyntheticData data;
    std::vector<std::pair<std::string, std::string>> truth;
    for (int f = 0; f < spec.families; ++f) {
        for (int m = 0; m < spec.members_per_family; ++m) {
            truth.emplace_back(synthetic_language(f, m), "family_" + std::to_string(f));
        }
    }
    data.truth = LabeledPartition::from_pairs(truth);

    for (int run = 0; run < spec.runs; ++run) {
        std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                          static_cast<std::uint32_t>(run)};
        std::mt19937_64 rng(seq);

        BitVector root(spec.bits);
        for (std::size_t i = 0; i < spec.bits; ++i) {
            root.set(i, (rng() >> 63) != 0);
        }
        const std::vector<LayerBlock> layout{{0, 0, spec.bits}};
        std::vector<BinaryLanguageVector> vectors;
        for (int f = 0; f < spec.families; ++f) {
            BitVector prototype = root;
            flip_bits(prototype, spec.p_proto, rng);
            for (int m = 0; m < spec.members_per_family; ++m) {
                BinaryLanguageVector v;
                v.bits = prototype;
                flip_bits(v.bits, spec.p_member, rng);
                v.tags = {synthetic_language(f, m), spec.model_prefix + "-" + std::to_string(run),
                          spec.corpus_prefix + "-" + std::to_string(run)};
                v.layout = layout;
                vectors.push_back(std::move(v));
            }
        }
        data.runs.push_back(std::move(vectors));
    }
    return data;
}

} // namespace langgeo
