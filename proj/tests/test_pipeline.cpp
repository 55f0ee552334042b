#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "langgeo/formats.hpp"
#include "langgeo/pipeline.hpp"
#include "langgeo/synth.hpp"

using namespace langgeo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("langgeo-" + tag + "-" + std::to_string(::getpid())))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

SyntheticData nine_runs(std::uint64_t seed)
{
    SyntheticSpec s;
    s.families = 3;
    s.members_per_family = 4;
    s.bits = 4096;
    s.runs = 9;
    s.seed = seed;
    return synth_generate(s);
}

/// Writes every run to disk and returns a matching config.
PipelineConfig write_inputs(const SyntheticData& data, const fs::path& dir)
{
    PipelineConfig config;
    for (std::size_t r = 0; r < data.runs.size(); ++r) {
        RunSpec run;
        run.model = data.runs[r].front().tags.model;
        run.corpus = data.runs[r].front().tags.corpus;
        for (const auto& v : data.runs[r]) {
            const fs::path p = dir / ("r" + std::to_string(r) + "_" + v.language() + ".lgv");
            write_vector(p, v);
            run.vectors.push_back(p);
        }
        config.runs.push_back(run);
    }
    write_text_file(dir / "truth.csv", partition_to_csv(data.truth));
    config.references.push_back({"truth", dir / "truth.csv"});
    return config;
}

} // namespace

TEST_SUITE("pipeline")
{
    TEST_CASE("identical vectors share a point and a zero edge")
    {
        BitVector b(64);
        b.set(5);
        const auto x = assemble_vector({{0, b}}, {"a", "m", "c"});
        auto y = x;
        y.tags.language = "b";
        const auto result = compute_pipeline({{x, y}}, {}, {});
        CHECK(result.embedding.coordinates.row(0) == result.embedding.coordinates.row(1));
        REQUIRE(result.tree.edges.size() == 1);
        CHECK(result.tree.edges[0].weight == 0.0);
        CHECK_FALSE(result.has_layout);
    }

    TEST_CASE("nine runs equal the hand-composed stages")
    {
        const auto data = nine_runs(5);
        const auto result = compute_pipeline(data.runs, {{"truth", data.truth}}, {});
        REQUIRE(result.run_matrices.size() == 9);

        // Entrywise mean of nine fully observed matrices, summed by hand.
        const auto n = static_cast<Eigen::Index>(data.runs[0].size());
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
        for (const auto& run : data.runs) {
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    sum(i, j) += static_cast<double>(xor_count(run[static_cast<std::size_t>(i)].bits,
                                                               run[static_cast<std::size_t>(j)].bits));
                }
            }
        }
        const Eigen::MatrixXd mean = sum / 9.0;
        CHECK((result.aggregate.values - mean).cwiseAbs().maxCoeff() <= 1e-12 * mean.maxCoeff());
        CHECK(result.aggregate.provenance.size() == 9);

        const auto manual = torgerson(mean);
        CHECK(manual.dimension() == result.embedding.dimension());
        CHECK((manual.coordinates - result.embedding.coordinates).cwiseAbs().maxCoeff() <= 1e-6);

        REQUIRE(result.evaluations.size() == 1);
        CHECK(result.evaluations[0].report.ari == 1.0);
        CHECK(result.has_layout);
        CHECK(result.layout_document["nodes"][0].contains("group"));
    }

    TEST_CASE("artifact bundle is deterministic")
    {
        TempDir tmp("pipeline-det");
        const auto data = nine_runs(6);
        auto config = write_inputs(data, tmp.path);
        config.output_dir = tmp.path / "a";
        const auto first = run_pipeline(config);
        config.output_dir = tmp.path / "b";
        run_pipeline(config);

        CHECK(first.manifest["vector_count"] == 108);
        CHECK(first.manifest["runs"].size() == 9);
        int compared = 0;
        for (const auto& entry : fs::directory_iterator(tmp.path / "a")) {
            const auto name = entry.path().filename();
            if (name == "manifest.json") {
                continue;
            }
            CHECK(read_file(entry.path()) == read_file(tmp.path / "b" / name));
            ++compared;
        }
        CHECK(compared >= 14);
        auto ma = nlohmann::json::parse(read_text_file(tmp.path / "a" / "manifest.json"));
        auto mb = nlohmann::json::parse(read_text_file(tmp.path / "b" / "manifest.json"));
        ma.erase("created_at");
        mb.erase("created_at");
        CHECK(ma == mb);
        CHECK(fs::exists(tmp.path / "a" / "layout.svg"));
        CHECK(fs::exists(tmp.path / "a" / "metrics_truth.json"));
    }

    TEST_CASE("uncovered pairs fail with a coverage report")
    {
        TempDir tmp("pipeline-cov");
        BitVector b(64);
        auto v = [&](const std::string& lang, const std::string& corpus) {
            return assemble_vector({{0, b}}, {lang, "m", corpus});
        };
        const std::vector<std::vector<BinaryLanguageVector>> runs{{v("a", "c1"), v("b", "c1")},
                                                                   {v("a", "c2"), v("c", "c2")}};
        PipelineOptions options;
        CHECK_THROWS_AS(compute_pipeline(runs, {}, options), CoverageError);

        options.missing = MissingPairPolicy::drop;
        const auto dropped = compute_pipeline(runs, {}, options);
        CHECK(dropped.embedded.size() == 2);
        CHECK(dropped.aggregate.size() == 3);

        options.missing = MissingPairPolicy::impute;
        options.impute_value = 10.0;
        const auto imputed = compute_pipeline(runs, {}, options);
        CHECK(imputed.embedded.values(1, 2) == 10.0);

        PipelineConfig config;
        for (std::size_t r = 0; r < runs.size(); ++r) {
            RunSpec spec{"m", runs[r][0].tags.corpus, {}};
            for (const auto& x : runs[r]) {
                const auto p = tmp.path / (spec.corpus + x.language() + ".lgv");
                write_vector(p, x);
                spec.vectors.push_back(p);
            }
            config.runs.push_back(spec);
        }
        config.output_dir = tmp.path / "out";
        CHECK_THROWS_AS(run_pipeline(config), CoverageError);
        const auto report = read_text_file(tmp.path / "out" / "coverage.txt");
        CHECK(report.find("b") != std::string::npos);
    }

    TEST_CASE("vectors must match the run they are listed under")
    {
        TempDir tmp("pipeline-tags");
        BitVector b(64);
        write_vector(tmp.path / "a.lgv", assemble_vector({{0, b}}, {"a", "m", "c"}));
        PipelineConfig config;
        config.runs.push_back({"m", "other", {tmp.path / "a.lgv"}});
        CHECK_THROWS_AS(run_pipeline(config), ValidationError);
    }

    TEST_CASE("config parsing")
    {
        TempDir tmp("pipeline-config");
        fs::create_directories(tmp.path / "vecs");
        BitVector b(64);
        write_vector(tmp.path / "vecs" / "b.lgv", assemble_vector({{0, b}}, {"b", "m", "c"}));
        write_vector(tmp.path / "vecs" / "a.lgv", assemble_vector({{0, b}}, {"a", "m", "c"}));
        const auto json = nlohmann::json::parse(R"({
            "runs": [{"model": "m", "corpus": "c", "vector_dir": "vecs"}],
            "epsilon": 1e-8,
            "kmeans": {"seed": 4, "restarts": 3},
            "references": [{"name": "fam", "path": "fam.csv"}],
            "output_dir": "out",
            "missing": {"impute": 2.5},
            "layout": {"targets": "metric", "groups": "fam"}
        })");
        const auto c = parse_pipeline_config(json, tmp.path);
        REQUIRE(c.runs.size() == 1);
        CHECK(c.runs[0].vectors == std::vector<fs::path>{tmp.path / "vecs" / "a.lgv", tmp.path / "vecs" / "b.lgv"});
        CHECK(c.epsilon == 1e-8);
        CHECK(c.seed == 4);
        CHECK(c.restarts == 3);
        CHECK(c.references[0].path == tmp.path / "fam.csv");
        CHECK(c.output_dir == tmp.path / "out");
        CHECK(c.missing == MissingPairPolicy::impute);
        CHECK(c.impute_value == 2.5);
        CHECK(c.layout_targets == LayoutTargets::metric);

        CHECK_THROWS_AS(parse_pipeline_config(nlohmann::json::parse(R"({"runs": []})")), ValidationError);
        CHECK_THROWS_AS(parse_pipeline_config(nlohmann::json::parse(R"({})")), ValidationError);
        CHECK_THROWS_AS(parse_pipeline_config(nlohmann::json::parse(
                            R"({"runs": [{"model": "m", "corpus": "c", "vectors": ["x"]},
                                         {"model": "m", "corpus": "c", "vectors": ["y"]}]})")),
                        ValidationError);
        CHECK_THROWS_AS(parse_pipeline_config(nlohmann::json::parse(
                            R"({"runs": [{"model": "m", "corpus": "c", "vectors": ["x"]}], "missing": "guess"})")),
                        ValidationError);
    }
}
