#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "langgeo/mds.hpp"
#include "langgeo/metricspace.hpp"

namespace langgeo {

/// Assignment of every language to exactly one label. Label ids are dense
/// from 0 and index into label_names.
struct LabeledPartition {
    std::vector<std::string> languages;
    std::vector<int> labels;
    std::vector<std::string> label_names;

    std::size_t size() const noexcept { return languages.size(); }
    int label_count() const noexcept { return static_cast<int>(label_names.size()); }

    /// Label ids are assigned in order of first appearance.
    static LabeledPartition from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);

    /// Same partition listed in the order of `languages`; every one must be present.
    LabeledPartition restricted_to(const std::vector<std::string>& languages) const;

    /// Drops label ids with no members and renumbers the rest densely.
    LabeledPartition compacted() const;
};

void validate(const LabeledPartition& p);

// ---------------------------------------------------------------------------
// k-means

struct KMeansOptions {
    int k = 2;
    std::uint64_t seed = 0;
    int restarts = 10;     ///< restart r is seeded with seed + r
    int max_iterations = 300;
};

struct KMeansResult {
    LabeledPartition partition;
    Eigen::MatrixXd centroids; ///< k x d
    double objective = 0.0;    ///< within-cluster sum of squared distances
    int iterations = 0;
    int best_restart = 0;
    std::vector<double> objective_trace; ///< of the winning restart, one entry per Lloyd step
};

/// k-means++ seeding followed by Lloyd iterations, best of `restarts`.
KMeansResult kmeans(const Eigen::MatrixXd& points, const std::vector<std::string>& names,
                    const KMeansOptions& options);

inline KMeansResult kmeans(const Embedding& embedding, int k, std::uint64_t seed, int restarts = 10)
{
    return kmeans(embedding.coordinates, embedding.labels, KMeansOptions{k, seed, restarts, 300});
}

// ---------------------------------------------------------------------------
// Partition quality

/// Mean silhouette from a precomputed distance matrix. Points in singleton
/// clusters contribute 0.
double silhouette(const Eigen::MatrixXd& distances, const std::vector<int>& labels, int label_count);

/// Silhouette with Euclidean distances between embedding coordinates.
double silhouette(const Embedding& embedding, const LabeledPartition& partition);

/// Silhouette on a fully observed distance matrix (e.g. raw Hamming).
double silhouette(const MaskedDistanceMatrix& distances, const LabeledPartition& partition);

double adjusted_rand_index(const LabeledPartition& a, const LabeledPartition& b);

double purity(const LabeledPartition& predicted, const LabeledPartition& truth);

// ---------------------------------------------------------------------------
// Confusion matrices

struct ConfusionMatrix {
    Eigen::MatrixXi counts; ///< rows: predicted clusters, columns: reference labels
    std::vector<std::string> row_names;
    std::vector<std::string> col_names;

    long total() const { return static_cast<long>(counts.sum()); }
};

ConfusionMatrix confusion_matrix(const LabeledPartition& predicted, const LabeledPartition& truth);

/// Maximum-weight assignment of rows to columns. Rectangular inputs are
/// padded with zeros. Returns, for each row, the matched column or -1.
std::vector<int> max_weight_assignment(const Eigen::MatrixXi& weights);

struct Alignment {
    ConfusionMatrix confusion;
    /// Row i of the aligned matrix is confusion row row_order[i].
    std::vector<int> row_order;
    /// Column j of the aligned matrix is confusion column col_order[j].
    /// Identity whenever rows >= columns.
    std::vector<int> col_order;
    long matched_total = 0; ///< trace of the aligned matrix

    ConfusionMatrix aligned() const;
};

Alignment confusion_and_align(const LabeledPartition& predicted, const LabeledPartition& truth);

// ---------------------------------------------------------------------------

struct EvaluationReport {
    double silhouette = 0.0;
    double ari = 0.0;
    double purity = 0.0;
    int k = 0;
    KMeansResult clustering;
    Alignment alignment;
};

/// k-means with k = number of reference labels, then silhouette, ARI and
/// purity. Silhouette uses embedding distances unless `silhouette_distances`
/// is given.
EvaluationReport evaluate(const Embedding& embedding, const LabeledPartition& reference, std::uint64_t seed,
                          int restarts = 10, const MaskedDistanceMatrix* silhouette_distances = nullptr);

} // namespace langgeo
