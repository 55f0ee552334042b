#include "langgeo/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "langgeo/parallel.hpp"

namespace langgeo {

LabeledPartition LabeledPartition::from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs)
{
    LabeledPartition p;
    std::unordered_map<std::string, int> ids;
    std::unordered_set<std::string> seen;
    for (const auto& [language, label] : pairs) {
        if (!seen.insert(language).second) {
            throw ValidationError("language '" + language + "' has more than one label");
        }
        auto [it, inserted] = ids.emplace(label, static_cast<int>(p.label_names.size()));
        if (inserted) {
            p.label_names.push_back(label);
        }
        p.languages.push_back(language);
        p.labels.push_back(it->second);
    }
    return p;
}

LabeledPartition LabeledPartition::restricted_to(const std::vector<std::string>& subset) const
{
    std::unordered_map<std::string, int> lookup;
    for (std::size_t i = 0; i < languages.size(); ++i) {
        lookup.emplace(languages[i], labels[i]);
    }
    LabeledPartition out;
    out.label_names = label_names;
    for (const auto& language : subset) {
        const auto it = lookup.find(language);
        if (it == lookup.end()) {
            throw ValidationError("language '" + language + "' has no label in the partition");
        }
        out.languages.push_back(language);
        out.labels.push_back(it->second);
    }
    return out.compacted();
}

LabeledPartition LabeledPartition::compacted() const
{
    std::vector<int> remap(label_names.size(), -1);
    LabeledPartition out;
    out.languages = languages;
    out.labels.reserve(labels.size());
    for (int label : labels) {
        if (remap[static_cast<std::size_t>(label)] < 0) {
            remap[static_cast<std::size_t>(label)] = 0; // mark used
        }
    }
    for (std::size_t id = 0; id < label_names.size(); ++id) {
        if (remap[id] == 0) {
            remap[id] = static_cast<int>(out.label_names.size());
            out.label_names.push_back(label_names[id]);
        }
    }
    for (int label : labels) {
        out.labels.push_back(remap[static_cast<std::size_t>(label)]);
    }
    return out;
}

void validate(const LabeledPartition& p)
{
    if (p.languages.size() != p.labels.size()) {
        throw ValidationError("partition has mismatched language and label counts");
    }
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < p.languages.size(); ++i) {
        if (!seen.insert(p.languages[i]).second) {
            throw ValidationError("language '" + p.languages[i] + "' appears twice in the partition");
        }
        if (p.labels[i] < 0 || p.labels[i] >= p.label_count()) {
            throw ValidationError("label id out of range for '" + p.languages[i] + "'");
        }
    }
}

// ---------------------------------------------------------------------------

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct LloydRun {
    std::vector<int> assignment;
    Eigen::MatrixXd centroids;
    double objective = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng)
{
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd centroids(k, x.cols());
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);
    auto pick = [&](Eigen::Index i, int c) {
        centroids.row(c) = x.row(i);
        chosen[static_cast<std::size_t>(i)] = true;
    };
    pick(static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(n)), 0);

    Eigen::VectorXd nearest = (x.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = nearest.sum();
        Eigen::Index next = -1;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double running = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                running += nearest(i);
                if (running > target && nearest(i) > 0.0) {
                    next = i;
                    break;
                }
            }
            if (next < 0) { // rounding at the top end
                nearest.maxCoeff(&next);
            }
        } else {
            // All remaining mass is zero (duplicate points): take any unchosen point.
            std::vector<Eigen::Index> free;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!chosen[static_cast<std::size_t>(i)]) {
                    free.push_back(i);
                }
            }
            next = free[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(free.size()))];
        }
        pick(next, c);
        nearest = nearest.cwiseMin((x.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }
    return centroids;
}

double objective_of(const Eigen::MatrixXd& x, const std::vector<int>& assignment, const Eigen::MatrixXd& centroids)
{
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        total += (x.row(i) - centroids.row(assignment[static_cast<std::size_t>(i)])).squaredNorm();
    }
    return total;
}

LloydRun lloyd(const Eigen::MatrixXd& x, int k, std::uint64_t seed, int max_iterations)
{
    const Eigen::Index n = x.rows();
    std::mt19937_64 rng(seed);
    LloydRun run;
    run.centroids = seed_plus_plus(x, k, rng);
    run.assignment.assign(static_cast<std::size_t>(n), -1);

    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::VectorXd dist = (run.centroids.rowwise() - x.row(i)).rowwise().squaredNorm();
            Eigen::Index best = 0;
            dist.minCoeff(&best);
            const int current = run.assignment[static_cast<std::size_t>(i)];
            if (current >= 0 && dist(current) == dist(best)) {
                best = current;
            }
            if (best != current) {
                run.assignment[static_cast<std::size_t>(i)] = static_cast<int>(best);
                changed = true;
            }
            ++sizes[static_cast<std::size_t>(best)];
        }

        // Empty clusters take the point farthest from its centroid, drawn
        // from clusters that can spare one.
        for (int c = 0; c < k; ++c) {
            if (sizes[static_cast<std::size_t>(c)] > 0) {
                continue;
            }
            Eigen::Index far = -1;
            double far_dist = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const int owner = run.assignment[static_cast<std::size_t>(i)];
                if (sizes[static_cast<std::size_t>(owner)] < 2) {
                    continue;
                }
                const double d = (x.row(i) - run.centroids.row(owner)).squaredNorm();
                if (d > far_dist) {
                    far_dist = d;
                    far = i;
                }
            }
            --sizes[static_cast<std::size_t>(run.assignment[static_cast<std::size_t>(far)])];
            run.assignment[static_cast<std::size_t>(far)] = c;
            run.centroids.row(c) = x.row(far);
            sizes[static_cast<std::size_t>(c)] = 1;
            changed = true;
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(run.assignment[static_cast<std::size_t>(i)]) += x.row(i);
        }
        for (int c = 0; c < k; ++c) {
            run.centroids.row(c) = sums.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);
        }
        run.trace.push_back(objective_of(x, run.assignment, run.centroids));
        run.iterations = iter + 1;
        if (!changed) {
            break;
        }
    }
    run.objective = run.trace.back();
    return run;
}

} // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, const std::vector<std::string>& names,
                    const KMeansOptions& options)
{
    const Eigen::Index n = points.rows();
    if (n == 0) {
        throw ValidationError("k-means on an empty embedding");
    }
    if (static_cast<Eigen::Index>(names.size()) != n) {
        throw ValidationError("k-means needs one name per point");
    }
    if (options.k < 1 || options.k > n) {
        throw ValidationError("k = " + std::to_string(options.k) + " must lie in [1, " + std::to_string(n) + "]");
    }
    if (options.restarts < 1 || options.max_iterations < 1) {
        throw ValidationError("k-means needs at least one restart and one iteration");
    }
    if (!points.allFinite()) {
        throw ValidationError("k-means input contains non-finite coordinates");
    }

    std::vector<LloydRun> runs(static_cast<std::size_t>(options.restarts));
    parallel_for(runs.size(), [&](std::size_t r) {
        runs[r] = lloyd(points, options.k, options.seed + r, options.max_iterations);
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].objective < runs[best].objective) {
            best = r;
        }
    }

    KMeansResult result;
    auto& run = runs[best];
    result.partition.languages = names;
    result.partition.labels = run.assignment;
    for (int c = 0; c < options.k; ++c) {
        result.partition.label_names.push_back("cluster_" + std::to_string(c));
    }
    result.centroids = std::move(run.centroids);
    result.objective = run.objective;
    result.iterations = run.iterations;
    result.best_restart = static_cast<int>(best);
    result.objective_trace = std::move(run.trace);
    return result;
}

// ---------------------------------------------------------------------------

double silhouette(const Eigen::MatrixXd& distances, const std::vector<int>& labels, int label_count)
{
    const auto n = static_cast<Eigen::Index>(labels.size());
    if (distances.rows() != n || distances.cols() != n) {
        throw ValidationError("silhouette: distance matrix does not match the label count");
    }
    if (label_count < 2) {
        throw ValidationError("silhouette needs at least two clusters");
    }
    std::vector<int> sizes(static_cast<std::size_t>(label_count), 0);
    for (int label : labels) {
        if (label < 0 || label >= label_count) {
            throw ValidationError("silhouette: label id out of range");
        }
        ++sizes[static_cast<std::size_t>(label)];
    }
    if (std::find(sizes.begin(), sizes.end(), 0) != sizes.end()) {
        throw ValidationError("silhouette: empty cluster");
    }

    double total = 0.0;
    std::vector<double> sums(static_cast<std::size_t>(label_count));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
        if (sizes[own] == 1) {
            continue;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) {
                sums[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] += distances(i, j);
            }
        }
        const double a = sums[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < sums.size(); ++c) {
            if (c != own) {
                b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
            }
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

double silhouette(const Embedding& embedding, const LabeledPartition& partition)
{
    const LabeledPartition p = partition.restricted_to(embedding.labels);
    return silhouette(pairwise_euclidean(embedding.coordinates), p.labels, p.label_count());
}

double silhouette(const MaskedDistanceMatrix& distances, const LabeledPartition& partition)
{
    require_complete(distances);
    const LabeledPartition p = partition.restricted_to(distances.labels);
    return silhouette(distances.values, p.labels, p.label_count());
}

namespace {

void require_same_languages(const LabeledPartition& a, const LabeledPartition& b)
{
    validate(a);
    validate(b);
    if (a.size() != b.size()) {
        throw ValidationError("partitions cover different language sets");
    }
    std::unordered_set<std::string> in_a(a.languages.begin(), a.languages.end());
    for (const auto& language : b.languages) {
        if (!in_a.count(language)) {
            throw ValidationError("partitions cover different language sets ('" + language + "')");
        }
    }
}

long long choose2(long long m) { return m * (m - 1) / 2; }

} // namespace

ConfusionMatrix confusion_matrix(const LabeledPartition& predicted, const LabeledPartition& truth)
{
    require_same_languages(predicted, truth);
    const LabeledPartition t = truth.restricted_to(predicted.languages);
    ConfusionMatrix cm;
    cm.row_names = predicted.label_names;
    cm.col_names = t.label_names;
    cm.counts = Eigen::MatrixXi::Zero(predicted.label_count(), t.label_count());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        cm.counts(predicted.labels[i], t.labels[i]) += 1;
    }
    return cm;
}

double adjusted_rand_index(const LabeledPartition& a, const LabeledPartition& b)
{
    // All pair counts are integers, so the index is evaluated as one ratio
    // of integers scaled by 2 * C(n, 2) and rounded once.
    const ConfusionMatrix cm = confusion_matrix(a, b);
    long long both = 0;
    for (Eigen::Index i = 0; i < cm.counts.rows(); ++i) {
        for (Eigen::Index j = 0; j < cm.counts.cols(); ++j) {
            both += choose2(cm.counts(i, j));
        }
    }
    long long same_a = 0;
    for (Eigen::Index i = 0; i < cm.counts.rows(); ++i) {
        same_a += choose2(cm.counts.row(i).sum());
    }
    long long same_b = 0;
    for (Eigen::Index j = 0; j < cm.counts.cols(); ++j) {
        same_b += choose2(cm.counts.col(j).sum());
    }
    const auto pairs = static_cast<__int128>(choose2(static_cast<long long>(a.size())));
    const __int128 numerator = 2 * (pairs * both - static_cast<__int128>(same_a) * same_b);
    const __int128 denominator = pairs * (same_a + same_b) - 2 * static_cast<__int128>(same_a) * same_b;
    if (denominator == 0) {
        return 1.0; // both all-singletons or both one cluster
    }
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

double purity(const LabeledPartition& predicted, const LabeledPartition& truth)
{
    const ConfusionMatrix cm = confusion_matrix(predicted, truth);
    if (cm.total() == 0) {
        throw ValidationError("purity of an empty partition");
    }
    long majority = 0;
    for (Eigen::Index i = 0; i < cm.counts.rows(); ++i) {
        majority += cm.counts.row(i).maxCoeff();
    }
    return static_cast<double>(majority) / static_cast<double>(cm.total());
}

std::vector<int> max_weight_assignment(const Eigen::MatrixXi& weights)
{
    const Eigen::Index rows = weights.rows();
    const Eigen::Index cols = weights.cols();
    const Eigen::Index n = std::max(rows, cols);
    if (n == 0) {
        return {};
    }
    // Shortest augmenting path Hungarian method on cost = -weight, 1-based.
    auto cost = [&](Eigen::Index i, Eigen::Index j) -> long long {
        return (i < rows && j < cols) ? -static_cast<long long>(weights(i, j)) : 0LL;
    };
    const long long inf = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(static_cast<std::size_t>(n + 1), 0), v(static_cast<std::size_t>(n + 1), 0);
    std::vector<Eigen::Index> match(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
    for (Eigen::Index i = 1; i <= n; ++i) {
        match[0] = i;
        Eigen::Index j0 = 0;
        std::vector<long long> minv(static_cast<std::size_t>(n + 1), inf);
        std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            const Eigen::Index i0 = match[static_cast<std::size_t>(j0)];
            long long delta = inf;
            Eigen::Index j1 = 0;
            for (Eigen::Index j = 1; j <= n; ++j) {
                const auto js = static_cast<std::size_t>(j);
                if (used[js]) {
                    continue;
                }
                const long long cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[js];
                if (cur < minv[js]) {
                    minv[js] = cur;
                    way[js] = j0;
                }
                if (minv[js] < delta) {
                    delta = minv[js];
                    j1 = j;
                }
            }
            for (Eigen::Index j = 0; j <= n; ++j) {
                const auto js = static_cast<std::size_t>(j);
                if (used[js]) {
                    u[static_cast<std::size_t>(match[js])] += delta;
                    v[js] -= delta;
                } else {
                    minv[js] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const Eigen::Index j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(static_cast<std::size_t>(rows), -1);
    for (Eigen::Index j = 1; j <= n; ++j) {
        const Eigen::Index i = match[static_cast<std::size_t>(j)] - 1;
        if (i < rows && j - 1 < cols) {
            row_to_col[static_cast<std::size_t>(i)] = static_cast<int>(j - 1);
        }
    }
    return row_to_col;
}

ConfusionMatrix Alignment::aligned() const
{
    ConfusionMatrix out;
    const auto r = static_cast<Eigen::Index>(row_order.size());
    const auto c = static_cast<Eigen::Index>(col_order.size());
    out.counts.resize(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        out.row_names.push_back(confusion.row_names[static_cast<std::size_t>(row_order[static_cast<std::size_t>(i)])]);
        for (Eigen::Index j = 0; j < c; ++j) {
            out.counts(i, j) = confusion.counts(row_order[static_cast<std::size_t>(i)], col_order[static_cast<std::size_t>(j)]);
        }
    }
    for (Eigen::Index j = 0; j < c; ++j) {
        out.col_names.push_back(confusion.col_names[static_cast<std::size_t>(col_order[static_cast<std::size_t>(j)])]);
    }
    return out;
}

Alignment confusion_and_align(const LabeledPartition& predicted, const LabeledPartition& truth)
{
    Alignment result;
    result.confusion = confusion_matrix(predicted, truth);
    const auto& counts = result.confusion.counts;
    const std::vector<int> match = max_weight_assignment(counts);
    const int rows = static_cast<int>(counts.rows());
    const int cols = static_cast<int>(counts.cols());

    // Rows sorted by their matched column; unmatched rows keep their order at the end.
    std::vector<int> rows_by_col(static_cast<std::size_t>(cols), -1);
    for (int i = 0; i < rows; ++i) {
        if (match[static_cast<std::size_t>(i)] >= 0) {
            rows_by_col[static_cast<std::size_t>(match[static_cast<std::size_t>(i)])] = i;
        }
    }
    std::vector<bool> col_used(static_cast<std::size_t>(cols), false);
    for (int j = 0; j < cols; ++j) {
        const int i = rows_by_col[static_cast<std::size_t>(j)];
        if (i >= 0) {
            result.row_order.push_back(i);
            result.col_order.push_back(j);
            col_used[static_cast<std::size_t>(j)] = true;
            result.matched_total += counts(i, j);
        }
    }
    for (int i = 0; i < rows; ++i) {
        if (match[static_cast<std::size_t>(i)] < 0) {
            result.row_order.push_back(i);
        }
    }
    for (int j = 0; j < cols; ++j) {
        if (!col_used[static_cast<std::size_t>(j)]) {
            result.col_order.push_back(j);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------

EvaluationReport evaluate(const Embedding& embedding, const LabeledPartition& reference, std::uint64_t seed,
                          int restarts, const MaskedDistanceMatrix* silhouette_distances)
{
    const LabeledPartition truth = reference.restricted_to(embedding.labels);
    EvaluationReport report;
    report.k = truth.label_count();
    report.clustering = kmeans(embedding, report.k, seed, restarts);
    const auto& predicted = report.clustering.partition;
    if (report.k >= 2) {
        report.silhouette = silhouette_distances != nullptr ? silhouette(*silhouette_distances, predicted)
                                                            : silhouette(embedding, predicted);
    }
    report.ari = adjusted_rand_index(predicted, truth);
    report.purity = purity(predicted, truth);
    report.alignment = confusion_and_align(predicted, truth);
    return report;
}

} // namespace langgeo
