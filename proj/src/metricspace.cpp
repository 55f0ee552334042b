#include "langgeo/metricspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "langgeo/parallel.hpp"

namespace langgeo {

Eigen::Index MaskedDistanceMatrix::index_of(const std::string& label) const
{
    const auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<Eigen::Index>(it - labels.begin());
}

bool operator==(const MaskedDistanceMatrix& a, const MaskedDistanceMatrix& b)
{
    return a.labels == b.labels && a.provenance == b.provenance && a.values.rows() == b.values.rows()
        && a.values.cols() == b.values.cols() && (a.values.array() == b.values.array()).all()
        && (a.observed == b.observed).all();
}

void validate(const MaskedDistanceMatrix& d)
{
    const Eigen::Index n = d.values.rows();
    if (d.values.cols() != n || d.observed.rows() != n || d.observed.cols() != n) {
        throw ValidationError("distance matrix and mask must be square and the same size");
    }
    if (static_cast<Eigen::Index>(d.labels.size()) != n) {
        throw ValidationError("distance matrix has " + std::to_string(n) + " rows but "
                              + std::to_string(d.labels.size()) + " labels");
    }
    std::unordered_set<std::string> seen;
    for (const auto& label : d.labels) {
        if (!seen.insert(label).second) {
            throw ValidationError("duplicate language tag '" + label + "'");
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!d.observed(i, i) || d.values(i, i) != 0.0) {
            throw ValidationError("diagonal entry " + std::to_string(i) + " must be observed and zero");
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (d.observed(i, j) != d.observed(j, i) || d.values(i, j) != d.values(j, i)) {
                throw ValidationError("distance matrix is not symmetric at (" + std::to_string(i) + ", "
                                      + std::to_string(j) + ")");
            }
            if (d.observed(i, j) && !(d.values(i, j) >= 0.0 && std::isfinite(d.values(i, j)))) {
                throw ValidationError("distance at (" + std::to_string(i) + ", " + std::to_string(j)
                                      + ") is negative or non-finite");
            }
        }
    }
}

std::uint64_t hamming(const BinaryLanguageVector& x, const BinaryLanguageVector& y)
{
    if (x.size() != y.size()) {
        throw ValidationError("vector lengths differ: " + std::to_string(x.size()) + " vs "
                              + std::to_string(y.size()));
    }
    if (x.layout != y.layout) {
        throw ValidationError("vectors '" + x.language() + "' and '" + y.language()
                              + "' have different layer layouts");
    }
    return xor_count(x.bits, y.bits);
}

MaskedDistanceMatrix distance_matrix(const std::vector<BinaryLanguageVector>& vectors)
{
    if (vectors.empty()) {
        throw ValidationError("distance_matrix needs at least one vector");
    }
    const auto n = static_cast<Eigen::Index>(vectors.size());
    MaskedDistanceMatrix d;
    d.values = Eigen::MatrixXd::Zero(n, n);
    d.observed = BoolMatrix::Constant(n, n, true);
    std::unordered_set<std::string> seen;
    for (const auto& v : vectors) {
        if (!seen.insert(v.language()).second) {
            throw ValidationError("duplicate language tag '" + v.language() + "'");
        }
        if (v.size() != vectors.front().size() || v.layout != vectors.front().layout) {
            throw ValidationError("vector '" + v.language() + "' does not share the run's layout");
        }
        if (v.tags.model != vectors.front().tags.model || v.tags.corpus != vectors.front().tags.corpus) {
            throw ValidationError("vector '" + v.language() + "' belongs to a different (model, corpus) run");
        }
        d.labels.push_back(v.language());
    }
    d.provenance = {{vectors.front().tags.model, vectors.front().tags.corpus}};

    // Row i owns entries (i, j > i); rows are independent.
    parallel_for(vectors.size(), [&](std::size_t i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                = static_cast<double>(xor_count(vectors[i].bits, vectors[j].bits));
        }
    });
    d.values.triangularView<Eigen::StrictlyLower>() = d.values.transpose().eval();
    return d;
}

std::vector<std::string> label_union(const std::vector<MaskedDistanceMatrix>& matrices)
{
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& m : matrices) {
        for (const auto& label : m.labels) {
            if (seen.insert(label).second) {
                out.push_back(label);
            }
        }
    }
    return out;
}

MaskedDistanceMatrix aggregate(const std::vector<MaskedDistanceMatrix>& matrices,
                               const std::vector<std::string>& label_universe)
{
    if (matrices.empty()) {
        throw ValidationError("aggregate needs at least one distance matrix");
    }
    std::unordered_map<std::string, Eigen::Index> position;
    for (std::size_t i = 0; i < label_universe.size(); ++i) {
        if (!position.emplace(label_universe[i], static_cast<Eigen::Index>(i)).second) {
            throw ValidationError("duplicate label '" + label_universe[i] + "' in label universe");
        }
    }
    const auto n = static_cast<Eigen::Index>(label_universe.size());
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXi hits = Eigen::MatrixXi::Zero(n, n);

    MaskedDistanceMatrix out;
    out.labels = label_universe;
    for (const auto& m : matrices) {
        validate(m);
        std::vector<Eigen::Index> map(m.labels.size());
        for (std::size_t i = 0; i < m.labels.size(); ++i) {
            const auto it = position.find(m.labels[i]);
            if (it == position.end()) {
                throw ValidationError("label '" + m.labels[i] + "' is not in the label universe");
            }
            map[i] = it->second;
        }
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            for (Eigen::Index j = 0; j < m.size(); ++j) {
                if (i != j && m.observed(i, j)) {
                    sum(map[i], map[j]) += m.values(i, j);
                    hits(map[i], map[j]) += 1;
                }
            }
        }
        for (const auto& p : m.provenance) {
            if (std::find(out.provenance.begin(), out.provenance.end(), p) == out.provenance.end()) {
                out.provenance.push_back(p);
            }
        }
    }

    out.values = Eigen::MatrixXd::Zero(n, n);
    out.observed = BoolMatrix::Constant(n, n, false);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.observed(i, i) = true;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && hits(i, j) > 0) {
                out.values(i, j) = sum(i, j) / hits(i, j);
                out.observed(i, j) = true;
            }
        }
    }
    return out;
}

std::string CoverageReport::describe() const
{
    std::ostringstream os;
    os << missing_pairs.size() << " language pair(s) observed by no input";
    if (!absent_labels.empty()) {
        os << "; languages with no observations:";
        for (const auto& label : absent_labels) {
            os << ' ' << label;
        }
    }
    const std::size_t shown = std::min<std::size_t>(missing_pairs.size(), 10);
    for (std::size_t k = 0; k < shown; ++k) {
        os << "\n  " << missing_pairs[k].first << " - " << missing_pairs[k].second;
    }
    if (shown < missing_pairs.size()) {
        os << "\n  ...";
    }
    return os.str();
}

CoverageReport coverage(const MaskedDistanceMatrix& d)
{
    CoverageReport report;
    const Eigen::Index n = d.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        bool any = false;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            any = any || d.observed(i, j);
            if (j > i && !d.observed(i, j)) {
                report.missing_pairs.push_back({d.labels[i], d.labels[j]});
            }
        }
        if (!any && n > 1) {
            report.absent_labels.push_back(d.labels[i]);
        }
    }
    return report;
}

CoverageError::CoverageError(CoverageReport report)
    : ValidationError("incomplete pair coverage: " + report.describe())
    , m_report(std::move(report))
{
}

void require_complete(const MaskedDistanceMatrix& d)
{
    auto report = coverage(d);
    if (!report.complete()) {
        throw CoverageError(std::move(report));
    }
}

MaskedDistanceMatrix drop_languages(const MaskedDistanceMatrix& d, const std::vector<std::string>& drop)
{
    std::unordered_set<std::string> removed(drop.begin(), drop.end());
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!removed.count(d.labels[i])) {
            keep.push_back(i);
        }
    }
    const auto n = static_cast<Eigen::Index>(keep.size());
    MaskedDistanceMatrix out;
    out.values.resize(n, n);
    out.observed.resize(n, n);
    out.provenance = d.provenance;
    for (Eigen::Index a = 0; a < n; ++a) {
        out.labels.push_back(d.labels[keep[a]]);
        for (Eigen::Index b = 0; b < n; ++b) {
            out.values(a, b) = d.values(keep[a], keep[b]);
            out.observed(a, b) = d.observed(keep[a], keep[b]);
        }
    }
    return out;
}

MaskedDistanceMatrix drop_uncovered(const MaskedDistanceMatrix& d)
{
    MaskedDistanceMatrix current = d;
    for (;;) {
        const Eigen::VectorXi missing = (!current.observed).cast<int>().matrix().rowwise().sum();
        if (missing.size() == 0 || missing.maxCoeff() == 0) {
            return current;
        }
        Eigen::Index worst = 0;
        for (Eigen::Index i = 0; i < missing.size(); ++i) {
            if (missing(i) >= missing(worst)) {
                worst = i;
            }
        }
        current = drop_languages(current, {current.labels[worst]});
    }
}

MaskedDistanceMatrix impute_missing(const MaskedDistanceMatrix& d, double constant)
{
    if (!(constant >= 0.0) || !std::isfinite(constant)) {
        throw ValidationError("imputation constant must be finite and non-negative");
    }
    MaskedDistanceMatrix out = d;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        for (Eigen::Index j = 0; j < d.size(); ++j) {
            if (!out.observed(i, j)) {
                out.values(i, j) = constant;
                out.observed(i, j) = true;
            }
        }
    }
    return out;
}

} // namespace langgeo
