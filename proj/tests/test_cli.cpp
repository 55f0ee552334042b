#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "langgeo/cli.hpp"
#include "langgeo/formats.hpp"
#include "langgeo/importance.hpp"
#include "langgeo/parallel.hpp"
#include "oracles.hpp"

using namespace langgeo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("langgeo-cli-" + tag + "-" + std::to_string(::getpid())))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("usage errors exit with 1")
    {
        CHECK(cli({}).code == exit_usage);
        CHECK(cli({"frobnicate"}).code == exit_usage);
        CHECK(cli({"embed"}).code == exit_usage);
        CHECK(cli({"cluster", "--input", "x.csv", "--k", "zero"}).code == exit_usage);
        CHECK(cli({"embed", "--input", "a", "--output", "b", "--missing", "sometimes"}).code == exit_usage);
        const auto help = cli({"--help"});
        CHECK(help.code == exit_ok);
        CHECK(help.out.find("pipeline") != std::string::npos);
    }

    TEST_CASE("unreadable and corrupt inputs exit with 2")
    {
        TempDir tmp("bad");
        const auto missing = cli({"mst", "--input", tmp / "nope.lgd"});
        CHECK(missing.code == exit_invalid);
        CHECK(missing.err.find("nope.lgd") != std::string::npos);

        write_text_file(tmp / "junk.lgd", "not a matrix at all");
        const auto junk = cli({"mst", "--input", tmp / "junk.lgd"});
        CHECK(junk.code == exit_invalid);
        CHECK(junk.err.find("bad magic") != std::string::npos);
    }

    TEST_CASE("singular hessian exits with 3")
    {
        TempDir tmp("singular");
        write_tensors(tmp / "dump.lgt", {{"weight", 0, TensorType::f64, Eigen::MatrixXd::Ones(2, 3)},
                                         {"calibration", 0, TensorType::f64, Eigen::MatrixXd::Zero(4, 3)}});
        const auto r = cli({"score", "--input", tmp / "dump.lgt", "--output", tmp / "s.lgt", "--damping-absolute", "0"});
        CHECK(r.code == exit_numeric);
        CHECK(r.err.find("singular Hessian") != std::string::npos);
    }

    TEST_CASE("score and binarize agree with the library")
    {
        TempDir tmp("score");
        std::mt19937_64 rng(81);
        const Eigen::MatrixXd w0 = oracle::random_matrix(3, 4, rng);
        const Eigen::MatrixXd x0 = oracle::random_matrix(10, 4, rng);
        const Eigen::MatrixXd w1 = oracle::random_matrix(2, 5, rng);
        const Eigen::MatrixXd x1 = oracle::random_matrix(6, 5, rng);
        write_tensors(tmp / "dump.lgt", {{"weight", 1, TensorType::f64, w1},
                                         {"calibration", 1, TensorType::f64, x1.topRows(2)},
                                         {"calibration", 1, TensorType::f64, x1.bottomRows(4)},
                                         {"weight", 0, TensorType::f64, w0},
                                         {"calibration", 0, TensorType::f64, x0}});
        REQUIRE(cli({"score", "--input", tmp / "dump.lgt", "--output", tmp / "scores.lgt"}).code == exit_ok);
        const auto scores = read_tensors(tmp / "scores.lgt");
        REQUIRE(scores.size() == 2);
        const auto h0 = accumulate_hessian(std::vector<Eigen::MatrixXd>{x0});
        const auto h1 = accumulate_hessian(std::vector<Eigen::MatrixXd>{x1});
        CHECK(scores[0].name == "importance");
        CHECK(scores[0].layer_id == 0);
        CHECK((scores[0].data - score_layer({w0, 0}, h0).data).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((scores[1].data - score_layer({w1, 1}, h1).data).cwiseAbs().maxCoeff() <= 1e-12);

        REQUIRE(cli({"binarize", "--input", tmp / "scores.lgt", "--output", tmp / "v.lgv", "--language", "en",
                     "--model", "toy", "--corpus", "wiki"})
                    .code
                == exit_ok);
        const auto v = read_vector(tmp / "v.lgv");
        const auto want = assemble_vector(
            {binarize_layer(ImportanceMatrix{scores[0].data, 0}), binarize_layer(ImportanceMatrix{scores[1].data, 1})},
            {"en", "toy", "wiki"});
        CHECK(v == want);
    }

    TEST_CASE("subcommands compose to the pipeline output")
    {
        TempDir tmp("compose");
        REQUIRE(cli({"synth", "--output", tmp / "data", "--families", "3", "--members", "4", "--bits", "2048",
                     "--runs", "3", "--seed", "12"})
                    .code
                == exit_ok);
        const auto pipe = cli({"pipeline", "--config", tmp / "data/pipeline.json", "--output", tmp / "pipe"});
        REQUIRE(pipe.code == exit_ok);
        CHECK(pipe.out.find("vectors 36") != std::string::npos);

        std::vector<std::string> matrices;
        for (int r = 0; r < 3; ++r) {
            const std::string out = tmp / ("run" + std::to_string(r) + ".lgd");
            REQUIRE(cli({"distmat", "--input-dir", tmp / ("data/run_" + std::to_string(r)), "--output", out}).code
                    == exit_ok);
            matrices.push_back(out);
        }
        std::vector<std::string> agg_args{"aggregate", "--output", tmp / "agg.lgd", "--inputs"};
        agg_args.insert(agg_args.end(), matrices.begin(), matrices.end());
        REQUIRE(cli(agg_args).code == exit_ok);
        REQUIRE(cli({"embed", "--input", tmp / "agg.lgd", "--output", tmp / "emb.csv"}).code == exit_ok);
        REQUIRE(cli({"evaluate", "--embedding", tmp / "emb.csv", "--reference", tmp / "data/truth.csv",
                     "--config", tmp / "data/pipeline.json", "--output", tmp / "metrics.json", "--clusters",
                     tmp / "clusters.csv", "--confusion", tmp / "confusion.csv"})
                    .code
                == exit_ok);
        REQUIRE(cli({"mst", "--input", tmp / "agg.lgd", "--output", tmp / "tree.json"}).code == exit_ok);
        REQUIRE(cli({"layout", "--tree", tmp / "tree.json", "--groups", tmp / "data/truth.csv", "--output",
                     tmp / "layout.json", "--svg", tmp / "layout.svg"})
                    .code
                == exit_ok);

        const std::vector<std::pair<std::string, std::string>> same{
            {"run0.lgd", "run_0_synth-model-0_synth-corpus-0.lgd"},
            {"agg.lgd", "aggregate.lgd"},
            {"emb.csv", "embedding.csv"},
            {"emb.json", "embedding.json"},
            {"metrics.json", "metrics_truth.json"},
            {"clusters.csv", "clusters_truth.csv"},
            {"confusion.csv", "confusion_truth.csv"},
            {"layout.json", "layout.json"},
            {"layout.svg", "layout.svg"},
        };
        for (const auto& [mine, theirs] : same) {
            INFO(mine);
            CHECK(read_file(tmp / mine) == read_file(tmp / ("pipe/" + theirs)));
        }
    }

    TEST_CASE("cluster reads seed and restarts from a config file")
    {
        TempDir tmp("cluster");
        Embedding e;
        e.coordinates = Eigen::MatrixXd(4, 1);
        e.coordinates << 0, 1, 10, 11;
        e.labels = {"a", "b", "c", "d"};
        write_text_file(tmp / "emb.csv", embedding_to_csv(e));
        write_text_file(tmp / "cfg.json", R"({"kmeans": {"seed": 3, "restarts": 2}})");
        const auto r = cli({"cluster", "--input", tmp / "emb.csv", "--k", "2", "--config", tmp / "cfg.json"});
        REQUIRE(r.code == exit_ok);
        const auto p = parse_partition_csv(r.out);
        CHECK(p.labels[0] == p.labels[1]);
        CHECK(p.labels[2] == p.labels[3]);
        CHECK(p.labels[0] != p.labels[2]);
    }

    TEST_CASE("embedding refuses an incomplete aggregate unless told how to fill it")
    {
        TempDir tmp("coverage");
        MaskedDistanceMatrix a;
        a.values = Eigen::Matrix2d::Zero();
        a.values(0, 1) = a.values(1, 0) = 3.0;
        a.observed = BoolMatrix::Constant(2, 2, true);
        a.labels = {"x", "y"};
        a.provenance = {{"m", "c1"}};
        auto b = a;
        b.labels = {"x", "z"};
        b.provenance = {{"m", "c2"}};
        write_matrix(tmp / "a.lgd", a);
        write_matrix(tmp / "b.lgd", b);
        const auto agg = cli({"aggregate", "--inputs", tmp / "a.lgd", tmp / "b.lgd", "--output", tmp / "agg.lgd",
                              "--csv", tmp / "agg.csv"});
        REQUIRE(agg.code == exit_ok);
        CHECK(agg.err.find("incomplete") != std::string::npos);

        const auto fail = cli({"embed", "--input", tmp / "agg.lgd", "--output", tmp / "e.csv"});
        CHECK(fail.code == exit_invalid);
        CHECK(fail.err.find("y") != std::string::npos);

        CHECK(cli({"embed", "--input", tmp / "agg.lgd", "--output", tmp / "e.csv", "--missing", "drop"}).code
              == exit_ok);
        CHECK(parse_embedding_csv(read_text_file(tmp / "e.csv")).labels.size() == 2);

        write_text_file(tmp / "cfg.json", R"({"missing": {"impute": 3}})");
        CHECK(cli({"embed", "--input", tmp / "agg.lgd", "--output", tmp / "e.csv", "--config", tmp / "cfg.json"}).code
              == exit_ok);
        CHECK(parse_embedding_csv(read_text_file(tmp / "e.csv")).labels.size() == 3);
    }

    TEST_CASE("thread flag overrides the environment")
    {
        TempDir tmp("threads");
        ::setenv("LANGGEO_THREADS", "3", 1);
        REQUIRE(cli({"synth", "--output", tmp / "d", "--bits", "64", "--members", "2", "--families", "2"}).code
                == exit_ok);
        CHECK(thread_limit() == 3);
        REQUIRE(cli({"--threads", "2", "synth", "--output", tmp / "d", "--bits", "64", "--members", "2",
                     "--families", "2"})
                    .code
                == exit_ok);
        CHECK(thread_limit() == 2);
        ::unsetenv("LANGGEO_THREADS");
        set_thread_limit(0);
    }
}
