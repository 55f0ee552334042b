#include "langgeo/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <set>
#include <sstream>

#include "langgeo/formats.hpp"
#include "langgeo/parallel.hpp"

namespace langgeo {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p)
{
    fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string file_slug(const std::string& s)
{
    std::string out;
    for (char c : s) {
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
    }
    return out;
}

} // namespace

PipelineConfig parse_pipeline_config(const nlohmann::json& json, const fs::path& base_dir)
{
    PipelineConfig config;
    try {
        for (const auto& run : json.at("runs")) {
            RunSpec spec;
            spec.model = run.at("model").get<std::string>();
            spec.corpus = run.at("corpus").get<std::string>();
            if (run.contains("vectors")) {
                for (const auto& p : run.at("vectors")) {
                    spec.vectors.push_back(resolve(base_dir, p.get<std::string>()));
                }
            }
            if (run.contains("vector_dir")) {
                const fs::path dir = resolve(base_dir, run.at("vector_dir").get<std::string>());
                if (!fs::is_directory(dir)) {
                    throw ValidationError("vector_dir '" + dir.string() + "' is not a directory");
                }
                std::vector<fs::path> found;
                for (const auto& entry : fs::directory_iterator(dir)) {
                    if (entry.is_regular_file() && entry.path().extension() == ".lgv") {
                        found.push_back(entry.path());
                    }
                }
                std::sort(found.begin(), found.end());
                spec.vectors.insert(spec.vectors.end(), found.begin(), found.end());
            }
            config.runs.push_back(std::move(spec));
        }
        config.epsilon = json.value("epsilon", default_mds_epsilon);
        if (json.contains("kmeans")) {
            const auto& km = json.at("kmeans");
            config.seed = km.value("seed", std::uint64_t{0});
            config.restarts = km.value("restarts", 10);
        }
        if (json.contains("references")) {
            for (const auto& ref : json.at("references")) {
                config.references.push_back(
                    {ref.at("name").get<std::string>(), resolve(base_dir, ref.at("path").get<std::string>())});
            }
        }
        if (json.contains("output_dir")) {
            config.output_dir = resolve(base_dir, json.at("output_dir").get<std::string>());
        }
        if (json.contains("missing")) {
            const auto& missing = json.at("missing");
            if (missing.is_object()) {
                config.missing = MissingPairPolicy::impute;
                config.impute_value = missing.at("impute").get<double>();
            } else {
                const auto policy = missing.get<std::string>();
                if (policy == "fail") {
                    config.missing = MissingPairPolicy::fail;
                } else if (policy == "drop") {
                    config.missing = MissingPairPolicy::drop;
                } else {
                    throw ValidationError("unknown missing-pair policy '" + policy + "'");
                }
            }
        }
        if (json.contains("layout")) {
            const auto& layout = json.at("layout");
            const auto targets = layout.value("targets", std::string("tree-path"));
            if (targets == "tree-path") {
                config.layout_targets = LayoutTargets::tree_path;
            } else if (targets == "metric") {
                config.layout_targets = LayoutTargets::metric;
            } else {
                throw ValidationError("unknown layout targets '" + targets + "'");
            }
            config.layout_groups = layout.value("groups", std::string());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed pipeline config: ") + e.what());
    }
    validate(config);
    return config;
}

void validate(const PipelineConfig& config)
{
    if (config.runs.empty()) {
        throw ValidationError("pipeline config needs at least one run");
    }
    std::set<std::pair<std::string, std::string>> tags;
    for (const auto& run : config.runs) {
        if (!tags.emplace(run.model, run.corpus).second) {
            throw ValidationError("run (" + run.model + ", " + run.corpus + ") appears twice");
        }
        if (run.vectors.empty()) {
            throw ValidationError("run (" + run.model + ", " + run.corpus + ") has no vector files");
        }
    }
    if (config.restarts < 1) {
        throw ValidationError("k-means restarts must be at least 1");
    }
    std::set<std::string> names;
    for (const auto& ref : config.references) {
        if (!names.insert(ref.name).second) {
            throw ValidationError("reference '" + ref.name + "' appears twice");
        }
    }
}

PipelineResult compute_pipeline(const std::vector<std::vector<BinaryLanguageVector>>& runs,
                                const std::vector<NamedReference>& references, const PipelineOptions& options)
{
    if (runs.empty()) {
        throw ValidationError("pipeline needs at least one run");
    }
    PipelineResult result;
    result.run_matrices.resize(runs.size());
    for (const auto& run : runs) {
        result.vector_count += run.size();
    }
    parallel_for(runs.size(), [&](std::size_t r) { result.run_matrices[r] = distance_matrix(runs[r]); });

    result.aggregate = aggregate(result.run_matrices, label_union(result.run_matrices));
    switch (options.missing) {
    case MissingPairPolicy::fail:
        require_complete(result.aggregate);
        result.embedded = result.aggregate;
        break;
    case MissingPairPolicy::drop:
        result.embedded = drop_uncovered(result.aggregate);
        break;
    case MissingPairPolicy::impute:
        result.embedded = impute_missing(result.aggregate, options.impute_value);
        break;
    }

    result.embedding = torgerson(result.embedded, options.epsilon);
    result.reconstruction = reconstruction_report(result.embedded, result.embedding);

    for (const auto& ref : references) {
        result.evaluations.push_back(
            {ref.name, evaluate(result.embedding, ref.partition, options.seed, options.restarts)});
    }

    result.tree = minimum_spanning_tree(result.embedded);
    const bool positive_edges = std::all_of(result.tree.edges.begin(), result.tree.edges.end(),
                                            [](const TreeEdge& e) { return e.weight > 0.0; });
    bool positive_metric = true;
    if (options.layout_targets == LayoutTargets::metric) {
        const auto& v = result.embedded.values;
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            for (Eigen::Index j = i + 1; j < v.cols(); ++j) {
                positive_metric = positive_metric && v(i, j) > 0.0;
            }
        }
    }
    if (positive_edges && positive_metric) {
        LayoutOptions layout_options;
        layout_options.targets = options.layout_targets;
        result.layout = kamada_kawai(result.tree, layout_options, &result.embedded);
        result.has_layout = true;

        const LabeledPartition* groups = nullptr;
        std::optional<LabeledPartition> restricted;
        for (const auto& ref : references) {
            if (options.layout_groups.empty() || ref.name == options.layout_groups) {
                restricted = ref.partition.restricted_to(result.tree.nodes);
                groups = &*restricted;
                break;
            }
        }
        result.layout_document = export_layout(result.tree, result.layout, groups);
    }
    return result;
}

nlohmann::json metrics_document(const std::string& reference, const EvaluationReport& report, std::uint64_t seed,
                                int restarts)
{
    return {{"reference", reference},
            {"k", report.k},
            {"silhouette", report.silhouette},
            {"ari", report.ari},
            {"purity", report.purity},
            {"kmeans_objective", report.clustering.objective},
            {"seed", seed},
            {"restarts", restarts}};
}

PipelineResult run_pipeline(const PipelineConfig& config)
{
    validate(config);
    struct Input {
        std::string path;
        std::uint64_t digest;
    };
    std::vector<std::vector<BinaryLanguageVector>> runs(config.runs.size());
    std::vector<std::vector<Input>> inputs(config.runs.size());
    parallel_for(config.runs.size(), [&](std::size_t r) {
        const auto& spec = config.runs[r];
        for (const auto& path : spec.vectors) {
            const auto bytes = read_file(path);
            BinaryLanguageVector v;
            try {
                v = decode_vector(bytes);
            } catch (const FormatError& e) {
                throw FormatError(e.kind(), e.offset(), path.string() + ": " + e.detail());
            }
            if (v.tags.model != spec.model || v.tags.corpus != spec.corpus) {
                throw ValidationError(path.string() + " is tagged (" + v.tags.model + ", " + v.tags.corpus
                                      + ") but listed under run (" + spec.model + ", " + spec.corpus + ")");
            }
            inputs[r].push_back({path.string(), fnv1a64(bytes)});
            runs[r].push_back(std::move(v));
        }
    });

    std::vector<NamedReference> references;
    nlohmann::json reference_digests = nlohmann::json::array();
    for (const auto& ref : config.references) {
        const auto bytes = read_file(ref.path);
        references.push_back({ref.name, parse_partition_csv(std::string(bytes.begin(), bytes.end()))});
        reference_digests.push_back({{"name", ref.name}, {"path", ref.path.string()}, {"fnv1a64", hex64(fnv1a64(bytes))}});
    }

    PipelineOptions options;
    options.epsilon = config.epsilon;
    options.seed = config.seed;
    options.restarts = config.restarts;
    options.missing = config.missing;
    options.impute_value = config.impute_value;
    options.layout_targets = config.layout_targets;
    options.layout_groups = config.layout_groups;

    PipelineResult result;
    try {
        result = compute_pipeline(runs, references, options);
    } catch (const CoverageError& e) {
        if (!config.output_dir.empty()) {
            write_text_file(config.output_dir / "coverage.txt", e.report().describe() + "\n");
        }
        throw;
    }

    nlohmann::json manifest;
    manifest["tool"] = "langgeo";
    manifest["version"] = toolkit_version;
    {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        std::ostringstream ts;
        ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
        manifest["created_at"] = ts.str();
    }
    manifest["epsilon"] = config.epsilon;
    manifest["kmeans"] = {{"seed", config.seed}, {"restarts", config.restarts}};
    manifest["vector_count"] = result.vector_count;
    manifest["language_count"] = result.aggregate.size();
    manifest["embedded_language_count"] = result.embedded.size();
    manifest["embedding_dimension"] = result.embedding.dimension();
    manifest["negative_eigenvalue_mass"] = result.reconstruction.negative_eigenvalue_mass;
    manifest["runs"] = nlohmann::json::array();
    for (std::size_t r = 0; r < config.runs.size(); ++r) {
        nlohmann::json files = nlohmann::json::array();
        for (const auto& in : inputs[r]) {
            files.push_back({{"path", in.path}, {"fnv1a64", hex64(in.digest)}});
        }
        manifest["runs"].push_back({{"model", config.runs[r].model},
                                    {"corpus", config.runs[r].corpus},
                                    {"vector_count", runs[r].size()},
                                    {"inputs", std::move(files)}});
    }
    manifest["references"] = std::move(reference_digests);

    if (!config.output_dir.empty()) {
        const fs::path& out = config.output_dir;
        fs::create_directories(out);
        nlohmann::json outputs = nlohmann::json::array();
        auto emit_bytes = [&](const std::string& name, const std::vector<std::uint8_t>& bytes) {
            write_file(out / name, bytes);
            outputs.push_back({{"path", name}, {"fnv1a64", hex64(fnv1a64(bytes))}});
        };
        auto emit_text = [&](const std::string& name, const std::string& text) {
            emit_bytes(name, std::vector<std::uint8_t>(text.begin(), text.end()));
        };

        for (std::size_t r = 0; r < result.run_matrices.size(); ++r) {
            emit_bytes("run_" + std::to_string(r) + "_" + file_slug(config.runs[r].model) + "_"
                           + file_slug(config.runs[r].corpus) + ".lgd",
                       encode_matrix(result.run_matrices[r]));
        }
        emit_bytes("aggregate.lgd", encode_matrix(result.aggregate));
        emit_text("aggregate.csv", matrix_to_csv(result.aggregate));
        emit_text("embedding.csv", embedding_to_csv(result.embedding));
        emit_text("embedding.json", embedding_sidecar(result.embedding).dump(2) + "\n");
        for (const auto& evaluation : result.evaluations) {
            const auto slug = file_slug(evaluation.reference);
            const auto& rep = evaluation.report;
            emit_text("metrics_" + slug + ".json",
                      metrics_document(evaluation.reference, rep, config.seed, config.restarts).dump(2) + "\n");
            emit_text("clusters_" + slug + ".csv", partition_to_csv(rep.clustering.partition));
            emit_text("confusion_" + slug + ".csv", confusion_to_csv(rep.alignment.aligned()));
        }
        if (result.has_layout) {
            emit_text("layout.json", result.layout_document.dump(2) + "\n");
            emit_text("layout.svg", render_svg(result.layout_document));
        }
        manifest["outputs"] = std::move(outputs);
        write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
    }
    result.manifest = std::move(manifest);
    return result;
}

} // namespace langgeo
