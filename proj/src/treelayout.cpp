#include "langgeo/treelayout.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>

namespace langgeo {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(int n) : m_parent(static_cast<std::size_t>(n)), m_rank(static_cast<std::size_t>(n), 0)
    {
        std::iota(m_parent.begin(), m_parent.end(), 0);
    }

    int find(int x)
    {
        while (m_parent[static_cast<std::size_t>(x)] != x) {
            auto& p = m_parent[static_cast<std::size_t>(x)];
            p = m_parent[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    }

    bool unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        if (m_rank[static_cast<std::size_t>(a)] < m_rank[static_cast<std::size_t>(b)]) {
            std::swap(a, b);
        }
        m_parent[static_cast<std::size_t>(b)] = a;
        if (m_rank[static_cast<std::size_t>(a)] == m_rank[static_cast<std::size_t>(b)]) {
            ++m_rank[static_cast<std::size_t>(a)];
        }
        return true;
    }

private:
    std::vector<int> m_parent;
    std::vector<int> m_rank;
};

std::vector<std::vector<std::pair<int, double>>> adjacency(const SpanningTree& tree)
{
    std::vector<std::vector<std::pair<int, double>>> adj(tree.nodes.size());
    for (const auto& e : tree.edges) {
        adj[static_cast<std::size_t>(e.source)].emplace_back(e.target, e.weight);
        adj[static_cast<std::size_t>(e.target)].emplace_back(e.source, e.weight);
    }
    return adj;
}

} // namespace

SpanningTree minimum_spanning_tree(const Eigen::MatrixXd& distances, std::vector<std::string> names)
{
    const auto n = static_cast<int>(distances.rows());
    if (n < 1 || distances.cols() != n || static_cast<int>(names.size()) != n) {
        throw ValidationError("minimum spanning tree needs a non-empty square matrix with one name per row");
    }
    std::vector<TreeEdge> candidates;
    candidates.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!std::isfinite(distances(i, j))) {
                throw ValidationError("non-finite distance in spanning tree input");
            }
            candidates.push_back({i, j, distances(i, j)});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const TreeEdge& a, const TreeEdge& b) { return a.weight < b.weight; });

    SpanningTree tree;
    tree.nodes = std::move(names);
    DisjointSets sets(n);
    for (const auto& e : candidates) {
        if (sets.unite(e.source, e.target)) {
            tree.edges.push_back(e);
            tree.total_weight += e.weight;
            if (static_cast<int>(tree.edges.size()) == n - 1) {
                break;
            }
        }
    }
    return tree;
}

SpanningTree minimum_spanning_tree(const MaskedDistanceMatrix& distances)
{
    validate(distances);
    require_complete(distances);
    return minimum_spanning_tree(distances.values, distances.labels);
}

void validate(const SpanningTree& tree)
{
    const auto n = static_cast<int>(tree.nodes.size());
    if (n == 0) {
        throw ValidationError("spanning tree has no nodes");
    }
    if (static_cast<int>(tree.edges.size()) != n - 1) {
        throw ValidationError("spanning tree on " + std::to_string(n) + " nodes must have " + std::to_string(n - 1)
                              + " edges, found " + std::to_string(tree.edges.size()));
    }
    DisjointSets sets(n);
    double total = 0.0;
    for (const auto& e : tree.edges) {
        if (e.source < 0 || e.target < 0 || e.source >= n || e.target >= n) {
            throw ValidationError("spanning tree edge refers to an unknown node");
        }
        if (!sets.unite(e.source, e.target)) {
            throw ValidationError("spanning tree contains a cycle or is disconnected");
        }
        total += e.weight;
    }
    if (std::abs(total - tree.total_weight) > 1e-9 * std::max(1.0, std::abs(total))) {
        throw ValidationError("spanning tree total weight does not match its edges");
    }
}

Eigen::MatrixXd tree_path_distances(const SpanningTree& tree)
{
    validate(tree);
    const auto n = static_cast<Eigen::Index>(tree.nodes.size());
    const auto adj = adjacency(tree);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    std::vector<int> stack;
    std::vector<bool> seen;
    for (Eigen::Index root = 0; root < n; ++root) {
        seen.assign(static_cast<std::size_t>(n), false);
        stack.assign(1, static_cast<int>(root));
        seen[static_cast<std::size_t>(root)] = true;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = true;
                    out(root, v) = out(root, u) + w;
                    stack.push_back(v);
                }
            }
        }
    }
    return out;
}

double layout_stress(const Eigen::MatrixX2d& positions, const Eigen::MatrixXd& targets)
{
    double stress = 0.0;
    for (Eigen::Index i = 0; i < positions.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < positions.rows(); ++j) {
            const double r = (positions.row(i) - positions.row(j)).norm();
            const double d = targets(i, j);
            stress += (r - d) * (r - d) / (d * d);
        }
    }
    return stress;
}

namespace {

// Partial stress, gradient and 2x2 Hessian for a single node.
struct NodeTerms {
    double energy = 0.0;
    Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
    Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

Eigen::Vector2d pair_gradient(const Eigen::Vector2d& delta, double d)
{
    const double r = delta.norm();
    if (r == 0.0) {
        return Eigen::Vector2d::Zero();
    }
    return 2.0 / (d * d) * (1.0 - d / r) * delta;
}

NodeTerms node_terms(const Eigen::MatrixX2d& p, const Eigen::MatrixXd& targets, Eigen::Index m,
                     const Eigen::Vector2d& at)
{
    NodeTerms t;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        if (i == m) {
            continue;
        }
        const Eigen::Vector2d delta = at - p.row(i).transpose();
        const double d = targets(m, i);
        const double w = 1.0 / (d * d);
        const double r = delta.norm();
        t.energy += w * (r - d) * (r - d);
        if (r == 0.0) {
            t.hessian += 2.0 * w * Eigen::Matrix2d::Identity();
            continue;
        }
        t.gradient += 2.0 * w * (1.0 - d / r) * delta;
        t.hessian += 2.0 * w * ((1.0 - d / r) * Eigen::Matrix2d::Identity() + d / (r * r * r) * delta * delta.transpose());
    }
    return t;
}

} // namespace

Layout kamada_kawai(const Eigen::MatrixXd& targets, const LayoutOptions& options)
{
    const Eigen::Index n = targets.rows();
    if (n < 1 || targets.cols() != n) {
        throw ValidationError("layout targets must be a non-empty square matrix");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (!(targets(i, j) > 0.0) || !std::isfinite(targets(i, j))) {
                throw ValidationError("layout target distance between distinct nodes " + std::to_string(i) + " and "
                                      + std::to_string(j) + " must be positive and finite");
            }
        }
    }

    Layout layout;
    layout.positions.resize(n, 2);
    const double radius = n > 1 ? 0.5 * targets.maxCoeff() : 0.0;
    const double pi = std::acos(-1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double angle = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
        layout.positions(i, 0) = radius * std::cos(angle);
        layout.positions(i, 1) = radius * std::sin(angle);
    }
    layout.initial_stress = layout_stress(layout.positions, targets);
    if (n == 1) {
        return layout;
    }

    const long max_iterations = options.max_iterations > 0 ? options.max_iterations : 1000L * static_cast<long>(n);
    auto& p = layout.positions;

    Eigen::MatrixX2d grad = Eigen::MatrixX2d::Zero(n, 2);
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i != m) {
                grad.row(m) += pair_gradient((p.row(m) - p.row(i)).transpose(), targets(m, i)).transpose();
            }
        }
    }

    long iter = 0;
    for (; iter < max_iterations; ++iter) {
        Eigen::Index m = 0;
        const double worst = std::sqrt(grad.rowwise().squaredNorm().maxCoeff(&m));
        layout.max_gradient = worst;
        if (worst < options.tolerance) {
            break;
        }

        const Eigen::Vector2d old = p.row(m).transpose();
        const NodeTerms terms = node_terms(p, targets, m, old);
        Eigen::Vector2d step;
        Eigen::LLT<Eigen::Matrix2d> llt(terms.hessian);
        if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0) {
            step = -llt.solve(terms.gradient);
        } else {
            double curvature = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (i != m) {
                    curvature += 2.0 / (targets(m, i) * targets(m, i));
                }
            }
            step = -terms.gradient / curvature;
        }

        // Halving line search; only accept steps that lower the stress.
        bool moved = false;
        for (int halving = 0; halving < 60; ++halving) {
            const Eigen::Vector2d candidate = old + step;
            if (node_terms(p, targets, m, candidate).energy < terms.energy) {
                p.row(m) = candidate.transpose();
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            break; // no descent left at floating-point resolution
        }

        // Refresh gradients touched by node m.
        grad.row(m).setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == m) {
                continue;
            }
            const double d = targets(m, i);
            const Eigen::Vector2d before = pair_gradient(old - p.row(i).transpose(), d);
            const Eigen::Vector2d after = pair_gradient((p.row(m) - p.row(i)).transpose(), d);
            grad.row(i) += (before - after).transpose(); // pair gradient w.r.t. p_i is the negation
            grad.row(m) += after.transpose();
        }
    }
    layout.iterations = iter;
    layout.stress = layout_stress(p, targets);
    layout.max_gradient = std::sqrt(grad.rowwise().squaredNorm().maxCoeff());
    return layout;
}

Layout kamada_kawai(const SpanningTree& tree, const LayoutOptions& options, const MaskedDistanceMatrix* metric)
{
    validate(tree);
    if (options.targets == LayoutTargets::tree_path) {
        return kamada_kawai(tree_path_distances(tree), options);
    }
    if (metric == nullptr) {
        throw ValidationError("metric layout targets need the distance matrix");
    }
    validate(*metric);
    require_complete(*metric);
    if (metric->labels != tree.nodes) {
        throw ValidationError("distance matrix labels do not match the tree nodes");
    }
    return kamada_kawai(metric->values, options);
}

nlohmann::json export_layout(const SpanningTree& tree, const Layout& layout, const LabeledPartition* groups)
{
    validate(tree);
    if (layout.positions.rows() != static_cast<Eigen::Index>(tree.nodes.size())) {
        throw ValidationError("layout and tree have different node counts");
    }
    std::unordered_map<std::string, std::string> group_of;
    if (groups != nullptr) {
        for (std::size_t i = 0; i < groups->size(); ++i) {
            group_of.emplace(groups->languages[i], groups->label_names[static_cast<std::size_t>(groups->labels[i])]);
        }
        for (const auto& node : tree.nodes) {
            if (!group_of.count(node)) {
                throw ValidationError("node '" + node + "' has no group label");
            }
        }
    }

    nlohmann::json doc;
    doc["nodes"] = nlohmann::json::array();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        nlohmann::json node{{"id", tree.nodes[i]},
                            {"x", layout.positions(static_cast<Eigen::Index>(i), 0)},
                            {"y", layout.positions(static_cast<Eigen::Index>(i), 1)}};
        if (groups != nullptr) {
            node["group"] = group_of.at(tree.nodes[i]);
        }
        doc["nodes"].push_back(std::move(node));
    }
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : tree.edges) {
        doc["edges"].push_back({{"source", tree.nodes[static_cast<std::size_t>(e.source)]},
                                {"target", tree.nodes[static_cast<std::size_t>(e.target)]},
                                {"weight", e.weight}});
    }
    doc["stress"] = layout.stress;
    return doc;
}

LayoutDocument parse_layout(const nlohmann::json& document)
{
    LayoutDocument out;
    try {
        const auto& nodes = document.at("nodes");
        const auto n = static_cast<Eigen::Index>(nodes.size());
        out.layout.positions.resize(n, 2);
        std::unordered_map<std::string, int> index;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& node = nodes.at(static_cast<std::size_t>(i));
            const auto id = node.at("id").get<std::string>();
            if (!index.emplace(id, static_cast<int>(i)).second) {
                throw ValidationError("duplicate node id '" + id + "' in layout document");
            }
            out.tree.nodes.push_back(id);
            out.layout.positions(i, 0) = node.at("x").get<double>();
            out.layout.positions(i, 1) = node.at("y").get<double>();
            out.groups.push_back(node.contains("group") ? std::optional(node.at("group").get<std::string>())
                                                        : std::nullopt);
        }
        for (const auto& edge : document.at("edges")) {
            const auto s = index.find(edge.at("source").get<std::string>());
            const auto t = index.find(edge.at("target").get<std::string>());
            if (s == index.end() || t == index.end()) {
                throw ValidationError("layout edge refers to an unknown node");
            }
            const double w = edge.at("weight").get<double>();
            out.tree.edges.push_back({s->second, t->second, w});
            out.tree.total_weight += w;
        }
        out.layout.stress = document.at("stress").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed layout document: ") + e.what());
    }
    validate(out.tree);
    return out;
}

std::string render_svg(const nlohmann::json& document)
{
    const LayoutDocument doc = parse_layout(document);
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
                                    "#8c6d31", "#843c39", "#7b4173", "#3182bd", "#e6550d", "#31a354"};
    constexpr std::size_t palette_size = sizeof(palette) / sizeof(palette[0]);
    constexpr double size = 1000.0;
    constexpr double margin = 60.0;

    const auto& pos = doc.layout.positions;
    Eigen::RowVector2d lo = pos.colwise().minCoeff();
    Eigen::RowVector2d hi = pos.colwise().maxCoeff();
    const double span = std::max({hi(0) - lo(0), hi(1) - lo(1), 1e-12});
    const double scale = (size - 2.0 * margin) / span;
    auto sx = [&](Eigen::Index i) { return margin + (pos(i, 0) - lo(0)) * scale; };
    auto sy = [&](Eigen::Index i) { return margin + (pos(i, 1) - lo(1)) * scale; };

    std::unordered_map<std::string, std::size_t> colour;
    for (const auto& g : doc.groups) {
        if (g && !colour.count(*g)) {
            const std::size_t next = colour.size();
            colour.emplace(*g, next);
        }
    }

    auto escape = [](const std::string& s) {
        std::string out;
        for (char c : s) {
            switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
            }
        }
        return out;
    };

    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
       << size << ' ' << size << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& e : doc.tree.edges) {
        os << "<line x1=\"" << sx(e.source) << "\" y1=\"" << sy(e.source) << "\" x2=\"" << sx(e.target) << "\" y2=\""
           << sy(e.target) << "\" stroke=\"#999999\" stroke-width=\"1.5\"/>\n";
    }
    for (Eigen::Index i = 0; i < pos.rows(); ++i) {
        const auto& g = doc.groups[static_cast<std::size_t>(i)];
        const char* fill = g ? palette[colour.at(*g) % palette_size] : "#4d4d4d";
        os << "<circle cx=\"" << sx(i) << "\" cy=\"" << sy(i) << "\" r=\"6\" fill=\"" << fill << "\"/>\n";
        os << "<text x=\"" << sx(i) + 8.0 << "\" y=\"" << sy(i) + 4.0
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(doc.tree.nodes[static_cast<std::size_t>(i)])
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace langgeo
