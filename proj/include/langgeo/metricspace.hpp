#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "langgeo/binarizer.hpp"
#include "langgeo/error.hpp"

namespace langgeo {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct Provenance {
    std::string model;
    std::string corpus;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Pairwise distances over a labelled set of languages. Entries whose mask
/// bit is false carry no information and hold 0.
struct MaskedDistanceMatrix {
    Eigen::MatrixXd values;
    BoolMatrix observed;
    std::vector<std::string> labels;
    std::vector<Provenance> provenance;

    Eigen::Index size() const noexcept { return values.rows(); }
    bool fully_observed() const { return observed.all(); }
    /// -1 when absent.
    Eigen::Index index_of(const std::string& label) const;

    friend bool operator==(const MaskedDistanceMatrix& a, const MaskedDistanceMatrix& b);
};

/// Symmetric values and mask, observed zero diagonal, non-negative observed
/// entries, one label per row, unique labels.
void validate(const MaskedDistanceMatrix& d);

/// Number of differing bit positions. Vectors must share length and layout.
std::uint64_t hamming(const BinaryLanguageVector& x, const BinaryLanguageVector& y);

/// Fully observed Hamming matrix for one (model, corpus) run.
MaskedDistanceMatrix distance_matrix(const std::vector<BinaryLanguageVector>& vectors);

/// Per-entry mean over the inputs that observe the pair, indexed by
/// `label_universe`. Pairs no input observes stay masked; inspect them with
/// coverage().
MaskedDistanceMatrix aggregate(const std::vector<MaskedDistanceMatrix>& matrices,
                               const std::vector<std::string>& label_universe);

/// Labels of all inputs in order of first appearance.
std::vector<std::string> label_union(const std::vector<MaskedDistanceMatrix>& matrices);

struct CoverageReport {
    struct Pair {
        std::string first;
        std::string second;
    };
    std::vector<Pair> missing_pairs;
    std::vector<std::string> absent_labels; ///< labels with no observed off-diagonal entry

    bool complete() const noexcept { return missing_pairs.empty(); }
    std::string describe() const;
};

CoverageReport coverage(const MaskedDistanceMatrix& d);

class CoverageError : public ValidationError {
public:
    explicit CoverageError(CoverageReport report);
    const CoverageReport& report() const noexcept { return m_report; }

private:
    CoverageReport m_report;
};

/// Throws CoverageError unless every off-diagonal pair is observed.
void require_complete(const MaskedDistanceMatrix& d);

MaskedDistanceMatrix drop_languages(const MaskedDistanceMatrix& d, const std::vector<std::string>& drop);

/// Repeatedly removes the language with the most unobserved pairs (ties:
/// highest row index) until the matrix is complete.
MaskedDistanceMatrix drop_uncovered(const MaskedDistanceMatrix& d);

/// Fills unobserved off-diagonal entries with `constant` and marks them observed.
MaskedDistanceMatrix impute_missing(const MaskedDistanceMatrix& d, double constant);

} // namespace langgeo
