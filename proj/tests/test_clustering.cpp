#include <doctest.h>

#include <random>

#include "langgeo/clustering.hpp"
#include "oracles.hpp"

using namespace langgeo;

namespace {

std::vector<std::string> names(std::size_t n)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back("x" + std::to_string(i));
    }
    return out;
}

LabeledPartition partition(const std::vector<int>& labels)
{
    std::vector<std::pair<std::string, std::string>> pairs;
    const auto langs = names(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        pairs.emplace_back(langs[i], "g" + std::to_string(labels[i]));
    }
    return LabeledPartition::from_pairs(pairs);
}

Embedding embedding_of(const Eigen::MatrixXd& points)
{
    Embedding e;
    e.coordinates = points;
    e.labels = names(static_cast<std::size_t>(points.rows()));
    return e;
}

Eigen::MatrixXd two_blobs(std::mt19937_64& rng, std::vector<int>& truth)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd p(20, 2);
    truth.assign(20, 0);
    for (int i = 0; i < 20; ++i) {
        const double cx = i < 10 ? 0.0 : 10.0;
        p(i, 0) = cx + g(rng);
        p(i, 1) = g(rng);
        truth[static_cast<std::size_t>(i)] = i < 10 ? 0 : 1;
    }
    return p;
}

double objective(const Eigen::MatrixXd& p, const std::vector<int>& labels, int k)
{
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(p.cols());
        int count = 0;
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            if (labels[static_cast<std::size_t>(i)] == c) {
                mean += p.row(i);
                ++count;
            }
        }
        if (count == 0) {
            continue;
        }
        mean /= count;
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            if (labels[static_cast<std::size_t>(i)] == c) {
                total += (p.row(i) - mean).squaredNorm();
            }
        }
    }
    return total;
}

} // namespace

TEST_SUITE("clustering")
{
    TEST_CASE("partitions number labels by first appearance")
    {
        const auto p = LabeledPartition::from_pairs({{"a", "z"}, {"b", "y"}, {"c", "z"}});
        CHECK(p.labels == std::vector<int>{0, 1, 0});
        CHECK(p.label_names == std::vector<std::string>{"z", "y"});
        CHECK_THROWS_AS(LabeledPartition::from_pairs({{"a", "z"}, {"a", "y"}}), ValidationError);

        const auto r = p.restricted_to({"c", "b"});
        CHECK(r.languages == std::vector<std::string>{"c", "b"});
        CHECK(r.label_names == std::vector<std::string>{"z", "y"});
        CHECK_THROWS_AS(p.restricted_to({"q"}), ValidationError);
    }

    TEST_CASE("k equal to n isolates every point")
    {
        std::mt19937_64 rng(41);
        const Eigen::MatrixXd p = oracle::random_matrix(6, 2, rng);
        const auto r = kmeans(p, names(6), {6, 3, 4, 300});
        CHECK(r.objective == 0.0);
        CHECK(r.partition.label_count() == 6);
    }

    TEST_CASE("k of one gives the mean")
    {
        std::mt19937_64 rng(42);
        const Eigen::MatrixXd p = oracle::random_matrix(9, 3, rng);
        const auto r = kmeans(p, names(9), {1, 0, 2, 300});
        CHECK((r.centroids.row(0) - p.colwise().mean()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(r.objective == doctest::Approx(objective(p, std::vector<int>(9, 0), 1)).epsilon(1e-12));
    }

    TEST_CASE("separated blobs are recovered for every seed")
    {
        std::mt19937_64 rng(43);
        std::vector<int> truth;
        const Eigen::MatrixXd p = two_blobs(rng, truth);
        const double blob_objective = objective(p, truth, 2);
        // The blob split beats every sampled alternative.
        std::uniform_int_distribution<int> coin(0, 1);
        for (int trial = 0; trial < 2000; ++trial) {
            std::vector<int> alt(20);
            for (auto& a : alt) {
                a = coin(rng);
            }
            if (oracle::ari_by_pairs(alt, truth) < 1.0) {
                CHECK(objective(p, alt, 2) > blob_objective);
            }
        }
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            const auto r = kmeans(p, names(20), {2, seed, 10, 300});
            CHECK(adjusted_rand_index(r.partition, partition(truth)) == 1.0);
            CHECK(r.objective == doctest::Approx(blob_objective).epsilon(1e-12));
        }
    }

    TEST_CASE("k-means is deterministic and monotone")
    {
        std::mt19937_64 rng(44);
        const Eigen::MatrixXd p = oracle::random_matrix(40, 3, rng);
        const auto a = kmeans(p, names(40), {4, 17, 5, 300});
        const auto b = kmeans(p, names(40), {4, 17, 5, 300});
        CHECK(a.partition.labels == b.partition.labels);
        CHECK(a.objective == b.objective);
        for (std::size_t i = 1; i < a.objective_trace.size(); ++i) {
            CHECK(a.objective_trace[i] <= a.objective_trace[i - 1] * (1.0 + 1e-12));
        }
        CHECK(a.objective == doctest::Approx(objective(p, a.partition.labels, 4)).epsilon(1e-10));
    }

    TEST_CASE("k-means validates its options")
    {
        const Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3, 2);
        CHECK_THROWS_AS(kmeans(p, names(3), {4, 0, 1, 300}), ValidationError);
        CHECK_THROWS_AS(kmeans(p, names(3), {0, 0, 1, 300}), ValidationError);
        CHECK_THROWS_AS(kmeans(p, names(3), {2, 0, 0, 300}), ValidationError);
        CHECK_THROWS_AS(kmeans(p, names(2), {2, 0, 1, 300}), ValidationError);
    }

    TEST_CASE("duplicate points with more clusters than distinct points")
    {
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(5, 2);
        p.row(4) << 1.0, 1.0;
        const auto r = kmeans(p, names(5), {3, 0, 3, 300});
        CHECK(r.partition.label_count() == 3);
        for (int c = 0; c < 3; ++c) {
            CHECK(std::count(r.partition.labels.begin(), r.partition.labels.end(), c) > 0);
        }
        CHECK(r.objective == 0.0);
    }

    TEST_CASE("silhouette limits")
    {
        Eigen::MatrixXd p(4, 1);
        p << 0, 0, 10, 10;
        const Embedding e = embedding_of(p);
        CHECK(silhouette(e, partition({0, 0, 1, 1})) == doctest::Approx(1.0));
        CHECK(silhouette(e, partition({0, 1, 0, 1})) < 0.0);
    }

    TEST_CASE("silhouette on a line by hand")
    {
        Eigen::MatrixXd p(4, 1);
        p << 0, 1, 10, 11;
        // a = 1 for every point; b = 10.5, 9.5, 9.5, 10.5.
        const double want = ((10.5 - 1) / 10.5 + (9.5 - 1) / 9.5 + (9.5 - 1) / 9.5 + (10.5 - 1) / 10.5) / 4.0;
        CHECK(silhouette(embedding_of(p), partition({0, 0, 1, 1})) == doctest::Approx(want).epsilon(1e-15));
    }

    TEST_CASE("silhouette singletons contribute zero")
    {
        Eigen::MatrixXd p(3, 1);
        p << 0, 1, 5;
        const double want = ((5.0 - 1) / 5.0 + (4.0 - 1) / 4.0) / 3.0;
        CHECK(silhouette(embedding_of(p), partition({0, 0, 1})) == doctest::Approx(want).epsilon(1e-15));
        CHECK_THROWS_AS(silhouette(embedding_of(p), partition({0, 0, 0})), ValidationError);
    }

    TEST_CASE("silhouette from a precomputed matrix")
    {
        MaskedDistanceMatrix d;
        d.values = Eigen::MatrixXd(4, 4);
        d.values << 0, 1, 10, 11, 1, 0, 9, 10, 10, 9, 0, 1, 11, 10, 1, 0;
        d.observed = BoolMatrix::Constant(4, 4, true);
        d.labels = names(4);
        const std::vector<int> labels{0, 0, 1, 1};
        CHECK(silhouette(d, partition(labels)) == doctest::Approx(oracle::silhouette(d.values, labels)).epsilon(1e-15));
    }

    TEST_CASE("ari limits")
    {
        CHECK(adjusted_rand_index(partition({0, 0, 1, 2}), partition({5, 5, 3, 4})) == 1.0);
        CHECK(adjusted_rand_index(partition({0, 1, 2, 3, 4}), partition({0, 0, 0, 0, 0})) == 0.0);
    }

    TEST_CASE("ari from pair enumeration")
    {
        const std::vector<int> a{0, 0, 0, 1, 1, 1};
        const std::vector<int> b{0, 0, 1, 1, 1, 1};
        // Pairs together in both: {01, 34, 35, 45} = 4; together in a: 6; in b: 1 + 6 = 7; of 15.
        const double expected = 6.0 * 7.0 / 15.0;
        const double want = (4.0 - expected) / (0.5 * (6.0 + 7.0) - expected);
        CHECK(adjusted_rand_index(partition(a), partition(b)) == doctest::Approx(want).epsilon(1e-15));
        CHECK(oracle::ari_by_pairs(a, b) == doctest::Approx(want).epsilon(1e-15));
    }

    TEST_CASE("ari needs the same languages")
    {
        auto a = partition({0, 1});
        auto b = partition({0, 1, 1});
        CHECK_THROWS_AS(adjusted_rand_index(a, b), ValidationError);
    }

    TEST_CASE("purity cases")
    {
        CHECK(purity(partition({0, 1, 1}), partition({2, 0, 0})) == 1.0);
        CHECK(purity(partition(std::vector<int>(10, 0)), partition({0, 0, 0, 0, 0, 1, 1, 1, 1, 1})) == 0.5);
        // Contingency [[3,1,0],[0,4,1],[1,0,2]].
        const std::vector<int> pred{0, 0, 0, 0, 1, 1, 1, 1, 1, 2, 2, 2};
        const std::vector<int> truth{0, 0, 0, 1, 1, 1, 1, 1, 2, 0, 2, 2};
        const auto cm = confusion_matrix(partition(pred), partition(truth));
        Eigen::Matrix3i want;
        want << 3, 1, 0, 0, 4, 1, 1, 0, 2;
        CHECK(cm.counts == want);
        CHECK(purity(partition(pred), partition(truth)) == 0.75);
    }

    TEST_CASE("assignment of diagonal and anti-diagonal tables")
    {
        Eigen::Matrix3i d;
        d << 5, 0, 0, 0, 3, 1, 0, 0, 4;
        CHECK(max_weight_assignment(d) == std::vector<int>{0, 1, 2});
        Eigen::Matrix3i anti;
        anti << 0, 0, 3, 0, 2, 0, 6, 0, 0;
        CHECK(max_weight_assignment(anti) == std::vector<int>{2, 1, 0});
    }

    TEST_CASE("assignment matches exhaustive search on 5x5 tables")
    {
        std::mt19937_64 rng(45);
        for (int trial = 0; trial < 30; ++trial) {
            Eigen::MatrixXi w(5, 5);
            for (Eigen::Index i = 0; i < w.size(); ++i) {
                w(i) = static_cast<int>(rng() % 10);
            }
            const auto match = max_weight_assignment(w);
            long total = 0;
            std::vector<bool> used(5, false);
            for (int i = 0; i < 5; ++i) {
                REQUIRE(match[static_cast<std::size_t>(i)] >= 0);
                CHECK_FALSE(used[static_cast<std::size_t>(match[static_cast<std::size_t>(i)])]);
                used[static_cast<std::size_t>(match[static_cast<std::size_t>(i)])] = true;
                total += w(i, match[static_cast<std::size_t>(i)]);
            }
            CHECK(total == oracle::best_assignment_total(w));
        }
    }

    TEST_CASE("rectangular assignment leaves extra rows unmatched")
    {
        Eigen::MatrixXi w(3, 2);
        w << 1, 5, 4, 0, 3, 3;
        const auto match = max_weight_assignment(w);
        CHECK(match == std::vector<int>{1, 0, -1});
    }

    TEST_CASE("aligned confusion puts the matching on the diagonal")
    {
        const std::vector<int> pred{2, 2, 2, 0, 0, 1, 1, 1};
        const std::vector<int> truth{0, 0, 1, 1, 1, 2, 2, 2};
        const auto al = confusion_and_align(partition(pred), partition(truth));
        const auto m = al.aligned();
        CHECK(m.counts.trace() == al.matched_total);
        CHECK(al.matched_total == oracle::best_assignment_total(al.confusion.counts));
        CHECK(m.total() == 8);
        CHECK(m.col_names == std::vector<std::string>{"g0", "g1", "g2"});
    }

    TEST_CASE("evaluate recovers blob references exactly")
    {
        std::mt19937_64 rng(46);
        std::vector<int> truth;
        const Eigen::MatrixXd p = two_blobs(rng, truth);
        const auto report = evaluate(embedding_of(p), partition(truth), 5);
        CHECK(report.k == 2);
        CHECK(report.ari == 1.0);
        CHECK(report.purity == 1.0);
        CHECK(report.silhouette == doctest::Approx(oracle::silhouette(pairwise_euclidean(p), truth)).epsilon(1e-12));
        CHECK(report.alignment.matched_total == 20);
    }
}
