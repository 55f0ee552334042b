#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "langgeo/clustering.hpp"
#include "langgeo/metricspace.hpp"

namespace langgeo {

struct TreeEdge {
    int source = 0;
    int target = 0; ///< source < target
    double weight = 0.0;

    friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

struct SpanningTree {
    std::vector<std::string> nodes;
    std::vector<TreeEdge> edges;
    double total_weight = 0.0;
};

/// Kruskal over the complete graph; equal weights are taken in
/// lexicographic (i, j) order.
SpanningTree minimum_spanning_tree(const MaskedDistanceMatrix& distances);
SpanningTree minimum_spanning_tree(const Eigen::MatrixXd& distances, std::vector<std::string> names);

/// n - 1 edges, acyclic, connected, total_weight consistent.
void validate(const SpanningTree& tree);

/// All-pairs distances along the weighted tree.
Eigen::MatrixXd tree_path_distances(const SpanningTree& tree);

enum class LayoutTargets { tree_path, metric };

struct LayoutOptions {
    LayoutTargets targets = LayoutTargets::tree_path;
    long max_iterations = 0; ///< 0 means 1000 * n
    double tolerance = 1e-6; ///< on the largest per-node gradient norm
};

struct Layout {
    Eigen::MatrixX2d positions; ///< row per tree node
    double initial_stress = 0.0;
    double stress = 0.0;
    long iterations = 0;
    double max_gradient = 0.0;
};

/// sum_{i<j} (|p_i - p_j| - d_ij)^2 / d_ij^2
double layout_stress(const Eigen::MatrixX2d& positions, const Eigen::MatrixXd& targets);

/// Kamada-Kawai stress minimization by node-wise Newton steps, starting from
/// a circle in node order. `metric` must be given when targets == metric.
Layout kamada_kawai(const SpanningTree& tree, const LayoutOptions& options = {},
                    const MaskedDistanceMatrix* metric = nullptr);

/// Same optimizer on an explicit target matrix.
Layout kamada_kawai(const Eigen::MatrixXd& targets, const LayoutOptions& options = {});

/// {"nodes":[{"id","x","y","group"?}],"edges":[{"source","target","weight"}],"stress"}
nlohmann::json export_layout(const SpanningTree& tree, const Layout& layout,
                             const LabeledPartition* groups = nullptr);

struct LayoutDocument {
    SpanningTree tree;
    Layout layout;
    std::vector<std::optional<std::string>> groups;
};

LayoutDocument parse_layout(const nlohmann::json& document);

/// Circles, edges and text labels, coloured by group from a fixed palette.
std::string render_svg(const nlohmann::json& document);

} // namespace langgeo
