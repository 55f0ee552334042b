#pragma once

// Torgerson scaling (classical multidimensional scaling).
//
//   J = I - 1/n 11^T,  B = -1/2 J (D o D) J,  B = V diag(lambda) V^T
//   Y = V_d diag(sqrt(lambda_1), ..., sqrt(lambda_d)),  lambda_i > epsilon
//
// Eigenvalues at or below epsilon (including negative ones, which appear
// whenever D is not Euclidean) are dropped and reported, never clamped.
// The threshold is raised to n * machine epsilon * max|lambda| when that is
// larger, so rounding noise on the null direction is never kept.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "langgeo/error.hpp"
#include "langgeo/metricspace.hpp"

namespace langgeo {

inline constexpr double default_mds_epsilon = 1e-10;

template <typename Scalar>
struct BasicEmbedding {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Matrix coordinates;       ///< n x d
    Vector eigenvalues;       ///< retained, strictly descending, all > epsilon
    Vector dropped_spectrum;  ///< everything else, descending
    std::vector<std::string> labels;
    Scalar epsilon = Scalar(default_mds_epsilon);

    Eigen::Index size() const noexcept { return coordinates.rows(); }
    Eigen::Index dimension() const noexcept { return coordinates.cols(); }
};

using Embedding = BasicEmbedding<double>;

/// -1/2 J (D o D) J, computed from row, column and grand means of D o D.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
double_centered_gram(const Eigen::MatrixBase<Derived>& distances)
{
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Matrix sq = distances.array().square().matrix();
    const auto row_mean = sq.rowwise().mean().eval();
    const auto col_mean = sq.colwise().mean().eval();
    const Scalar grand = sq.mean();
    Matrix b = sq;
    b.colwise() -= row_mean;
    b.rowwise() -= col_mean;
    b.array() += grand;
    return Scalar(-0.5) * b;
}

namespace detail {

template <typename Derived>
void check_distance_matrix(const Eigen::MatrixBase<Derived>& d)
{
    using Scalar = typename Derived::Scalar;
    if (d.rows() != d.cols()) {
        throw ValidationError("distance matrix must be square");
    }
    if (d.rows() < 2) {
        throw ValidationError("classical scaling needs at least two points");
    }
    if (!d.allFinite()) {
        throw ValidationError("distance matrix contains non-finite values");
    }
    const Scalar scale = std::max(Scalar(1), d.cwiseAbs().maxCoeff());
    const Scalar tol = Scalar(64) * Eigen::NumTraits<Scalar>::epsilon() * scale;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        if (std::abs(d(i, i)) > tol) {
            throw ValidationError("distance matrix has a non-zero diagonal at " + std::to_string(i));
        }
        for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
            if (std::abs(d(i, j) - d(j, i)) > tol) {
                throw ValidationError("distance matrix is not symmetric at (" + std::to_string(i) + ", "
                                      + std::to_string(j) + ")");
            }
        }
    }
}

} // namespace detail

/// Classical scaling of a dense distance matrix.
template <typename Derived>
BasicEmbedding<typename Derived::Scalar> torgerson(const Eigen::MatrixBase<Derived>& distances,
                                                    typename Derived::Scalar epsilon
                                                    = typename Derived::Scalar(default_mds_epsilon))
{
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    detail::check_distance_matrix(distances);
    const Eigen::Index n = distances.rows();
    const Matrix b = double_centered_gram(distances);
    const Matrix sym = Scalar(0.5) * (b + b.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericError("symmetric eigendecomposition did not converge");
    }
    const Vector& lambda = solver.eigenvalues();
    const Matrix& vectors = solver.eigenvectors();

    // Descending by eigenvalue; equal eigenvalues keep solver order.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index c) { return lambda(a) > lambda(c); });

    // Eigenvalues within rounding distance of zero are noise from the null
    // direction of J, whatever epsilon says.
    const Scalar rank_floor = Scalar(n) * Eigen::NumTraits<Scalar>::epsilon() * lambda.cwiseAbs().maxCoeff();
    const Scalar threshold = std::max(epsilon, rank_floor);
    Eigen::Index d = 0;
    while (d < n && lambda(order[static_cast<std::size_t>(d)]) > threshold) {
        ++d;
    }

    BasicEmbedding<Scalar> emb;
    emb.epsilon = epsilon;
    emb.eigenvalues.resize(d);
    emb.dropped_spectrum.resize(n - d);
    emb.coordinates.resize(n, d);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        if (k >= d) {
            emb.dropped_spectrum(k - d) = lambda(src);
            continue;
        }
        Vector v = vectors.col(src);
        // Sign convention: first clearly non-zero entry is positive.
        const Scalar cutoff = Scalar(1e-8) * v.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(v(i)) > cutoff) {
                if (v(i) < Scalar(0)) {
                    v = -v;
                }
                break;
            }
        }
        emb.eigenvalues(k) = lambda(src);
        emb.coordinates.col(k) = v * std::sqrt(lambda(src));
    }
    return emb;
}

/// Classical scaling of a labelled, fully observed distance matrix.
inline Embedding torgerson(const MaskedDistanceMatrix& distances, double epsilon = default_mds_epsilon)
{
    validate(distances);
    require_complete(distances);
    Embedding emb = torgerson(distances.values, epsilon);
    emb.labels = distances.labels;
    return emb;
}

/// Euclidean distances between the rows of `points`.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
pairwise_euclidean(const Eigen::MatrixBase<Derived>& points)
{
    using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index n = points.rows();
    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            out(i, j) = out(j, i) = (points.row(i) - points.row(j)).norm();
        }
    }
    return out;
}

struct ReconstructionReport {
    double max_abs_error = 0.0;
    double mean_abs_error = 0.0;          ///< over off-diagonal pairs i < j
    double negative_eigenvalue_mass = 0.0; ///< sum |lambda < 0| / sum |lambda|
};

ReconstructionReport reconstruction_report(const MaskedDistanceMatrix& distances, const Embedding& embedding);

} // namespace langgeo
