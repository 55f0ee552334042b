#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "langgeo/clustering.hpp"
#include "langgeo/mds.hpp"
#include "langgeo/metricspace.hpp"
#include "langgeo/treelayout.hpp"

namespace langgeo {

inline constexpr const char* toolkit_version = "0.1.0";

enum class MissingPairPolicy { fail, drop, impute };

struct RunSpec {
    std::string model;
    std::string corpus;
    std::vector<std::filesystem::path> vectors;
};

struct ReferenceSpec {
    std::string name;
    std::filesystem::path path;
};

/// JSON form:
/// {"runs":[{"model":str,"corpus":str,"vectors":[path...]}|{"model","corpus","vector_dir":path}],
///  "epsilon":1e-10, "kmeans":{"seed":0,"restarts":10},
///  "references":[{"name":str,"path":path}], "output_dir":path,
///  "missing":"fail"|"drop"|{"impute":number},
///  "layout":{"targets":"tree-path"|"metric","groups":reference name}}
struct PipelineConfig {
    std::vector<RunSpec> runs;
    double epsilon = default_mds_epsilon;
    std::uint64_t seed = 0;
    int restarts = 10;
    std::vector<ReferenceSpec> references;
    std::filesystem::path output_dir;
    MissingPairPolicy missing = MissingPairPolicy::fail;
    double impute_value = 0.0;
    LayoutTargets layout_targets = LayoutTargets::tree_path;
    std::string layout_groups; ///< reference name used to colour the layout; empty: first reference
};

/// Relative paths are resolved against `base_dir`; a "vector_dir" entry
/// expands to its *.lgv files in lexicographic order.
PipelineConfig parse_pipeline_config(const nlohmann::json& json, const std::filesystem::path& base_dir = {});
void validate(const PipelineConfig& config);

struct PipelineOptions {
    double epsilon = default_mds_epsilon;
    std::uint64_t seed = 0;
    int restarts = 10;
    MissingPairPolicy missing = MissingPairPolicy::fail;
    double impute_value = 0.0;
    LayoutTargets layout_targets = LayoutTargets::tree_path;
    std::string layout_groups;
};

struct NamedReference {
    std::string name;
    LabeledPartition partition;
};

struct Evaluation {
    std::string reference;
    EvaluationReport report;
};

struct PipelineResult {
    std::vector<MaskedDistanceMatrix> run_matrices;
    MaskedDistanceMatrix aggregate;  ///< before any missing-pair handling
    MaskedDistanceMatrix embedded;   ///< what was actually embedded
    Embedding embedding;
    ReconstructionReport reconstruction;
    std::vector<Evaluation> evaluations;
    SpanningTree tree;
    Layout layout;
    bool has_layout = false;         ///< false when some tree edge has zero length
    nlohmann::json layout_document;
    std::size_t vector_count = 0;
    nlohmann::json manifest;         ///< filled by run_pipeline
};

/// Distance matrices per run, observed-entry aggregation, classical scaling,
/// optional evaluation against references, spanning tree and layout.
PipelineResult compute_pipeline(const std::vector<std::vector<BinaryLanguageVector>>& runs,
                                const std::vector<NamedReference>& references, const PipelineOptions& options);

/// Metrics report written per reference by the pipeline and `evaluate`.
nlohmann::json metrics_document(const std::string& reference, const EvaluationReport& report, std::uint64_t seed,
                                int restarts);

/// Loads every input, runs compute_pipeline and, when output_dir is set,
/// writes the artifact bundle plus manifest.json.
PipelineResult run_pipeline(const PipelineConfig& config);

} // namespace langgeo
