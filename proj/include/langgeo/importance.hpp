#pragma once

// Second-order weight importance: layer-local Hessians from calibration
// activations, the SparseGPT-style score W^2 / diag(H^-1), and the
// single-weight pruning criterion it generalizes.
//
// Inputs may arrive in any floating scalar type; all arithmetic is carried
// out in double.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "langgeo/error.hpp"

namespace langgeo {

struct DampingPolicy {
    enum class Kind { relative, absolute };

    Kind kind = Kind::relative;
    double value = 0.01;

    /// lambda = rho * mean(diag(X^T X))
    static DampingPolicy relative(double rho = 0.01) { return {Kind::relative, rho}; }
    static DampingPolicy absolute(double lambda) { return {Kind::absolute, lambda}; }
};

struct Hessian {
    Eigen::MatrixXd data;
    double damping = 0.0; ///< lambda actually added to the diagonal
};

struct LayerWeights {
    Eigen::MatrixXd data; ///< d_out x d_in
    std::int64_t layer_id = 0;
};

struct ImportanceMatrix {
    Eigen::MatrixXd data; ///< same shape as the scored weights, entries >= 0
    std::int64_t layer_id = 0;
};

struct WeightUpdate {
    Eigen::VectorXd delta;
    Eigen::Index pruned_index = 0;
    double error_increase = 0.0;
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what)
{
    if (!m.derived().template cast<double>().allFinite()) {
        throw ValidationError(std::string(what) + " contains non-finite values");
    }
}

} // namespace detail

/// Cholesky factor of a damped Hessian. Construction fails loudly instead
/// of falling back to a pseudo-inverse.
class HessianFactor {
public:
    explicit HessianFactor(const Hessian& hessian) : HessianFactor(hessian.data) {}

    explicit HessianFactor(const Eigen::MatrixXd& h)
    {
        if (h.rows() == 0 || h.rows() != h.cols()) {
            throw ValidationError("Hessian must be a non-empty square matrix");
        }
        m_llt.compute(h);
        const double scale = h.diagonal().cwiseAbs().maxCoeff();
        const double floor = 16.0 * std::numeric_limits<double>::epsilon() * scale;
        bool ok = m_llt.info() == Eigen::Success && scale > 0.0;
        if (ok) {
            const Eigen::VectorXd pivots = m_llt.matrixL().toDenseMatrix().diagonal();
            ok = (pivots.array().square() > floor).all();
        }
        if (!ok) {
            throw NumericError("singular Hessian, increase damping");
        }
    }

    Eigen::Index size() const { return m_llt.rows(); }

    /// diag(H^-1), one triangular solve per unit vector.
    Eigen::VectorXd inverse_diagonal() const
    {
        const Eigen::Index n = size();
        Eigen::MatrixXd linv = Eigen::MatrixXd::Identity(n, n);
        m_llt.matrixL().solveInPlace(linv);
        return linv.colwise().squaredNorm().transpose();
    }

    /// H^-1 e_q
    Eigen::VectorXd inverse_column(Eigen::Index q) const
    {
        return m_llt.solve(Eigen::VectorXd::Unit(size(), q));
    }

private:
    Eigen::LLT<Eigen::MatrixXd> m_llt;
};

/// Streams calibration batches into sum_b X_b^T X_b without keeping them.
class HessianAccumulator {
public:
    template <typename Derived>
    void add(const Eigen::MatrixBase<Derived>& batch)
    {
        if (batch.cols() == 0) {
            throw ValidationError("calibration batch has zero columns");
        }
        if (m_gram.size() == 0) {
            m_gram = Eigen::MatrixXd::Zero(batch.cols(), batch.cols());
        } else if (batch.cols() != m_gram.cols()) {
            throw ValidationError("calibration batch has " + std::to_string(batch.cols())
                                  + " columns, expected " + std::to_string(m_gram.cols()));
        }
        detail::require_finite(batch, "calibration batch");
        if (batch.rows() == 0) {
            return;
        }
        const Eigen::MatrixXd x = batch.template cast<double>();
        m_gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
        m_rows += batch.rows();
    }

    Eigen::Index rows() const { return m_rows; }
    Eigen::Index dim() const { return m_gram.cols(); }

    /// Undamped X^T X, fully symmetric.
    Eigen::MatrixXd gram() const
    {
        Eigen::MatrixXd full = m_gram.selfadjointView<Eigen::Lower>();
        return full;
    }

    Hessian finalize(const DampingPolicy& policy) const
    {
        if (m_rows == 0) {
            throw ValidationError("no calibration rows were accumulated");
        }
        if (!(policy.value >= 0.0) || !std::isfinite(policy.value)) {
            throw ValidationError("damping must be finite and non-negative");
        }
        Hessian h;
        h.data = gram();
        h.damping = policy.kind == DampingPolicy::Kind::relative
                        ? policy.value * h.data.diagonal().mean()
                        : policy.value;
        h.data.diagonal().array() += h.damping;
        if (h.damping == 0.0) {
            HessianFactor check(h); // throws on an exactly singular accumulation
        }
        return h;
    }

private:
    Eigen::MatrixXd m_gram;
    Eigen::Index m_rows = 0;
};

/// Sum of X_b^T X_b over batches plus the damping term.
template <typename MatrixType>
Hessian accumulate_hessian(const std::vector<MatrixType>& batches,
                           const DampingPolicy& policy = DampingPolicy::relative())
{
    if (batches.empty()) {
        throw ValidationError("accumulate_hessian needs at least one batch");
    }
    HessianAccumulator acc;
    for (const auto& batch : batches) {
        acc.add(batch);
    }
    return acc.finalize(policy);
}

/// S_ij = W_ij^2 / diag(H^-1)_j
template <typename Derived>
Eigen::MatrixXd importance_scores(const Eigen::MatrixBase<Derived>& weights, const HessianFactor& factor)
{
    if (weights.cols() != factor.size()) {
        throw ValidationError("weight matrix has " + std::to_string(weights.cols())
                              + " columns but the Hessian is " + std::to_string(factor.size()) + " wide");
    }
    detail::require_finite(weights, "weight matrix");
    const Eigen::RowVectorXd inv_diag = factor.inverse_diagonal().transpose();
    return weights.template cast<double>().array().square().rowwise() / inv_diag.array();
}

inline ImportanceMatrix score_layer(const LayerWeights& weights, const Hessian& hessian)
{
    return {importance_scores(weights.data, HessianFactor(hessian)), weights.layer_id};
}

namespace detail {

template <typename Derived>
void check_row(const Eigen::MatrixBase<Derived>& w, const HessianFactor& factor, Eigen::Index q)
{
    if (w.size() != factor.size()) {
        throw ValidationError("weight row length does not match the Hessian");
    }
    if (q < 0 || q >= w.size()) {
        throw ValidationError("pruned index " + std::to_string(q) + " out of range [0, "
                              + std::to_string(w.size()) + ")");
    }
}

} // namespace detail

/// Error increase from optimally removing weight q: w_q^2 / (2 [H^-1]_qq).
template <typename Derived>
double obd_error_increase(const Eigen::MatrixBase<Derived>& w, const Hessian& hessian, Eigen::Index q)
{
    const HessianFactor factor(hessian);
    detail::check_row(w, factor, q);
    const double wq = static_cast<double>(w(q));
    const double hinv_qq = factor.inverse_column(q)(q);
    return 0.5 * wq * wq / hinv_qq;
}

/// Minimizer of 1/2 dw^T H dw subject to dw_q + w_q = 0.
template <typename Derived>
WeightUpdate optimal_update(const Eigen::MatrixBase<Derived>& w, const Hessian& hessian, Eigen::Index q)
{
    const HessianFactor factor(hessian);
    detail::check_row(w, factor, q);
    const double wq = static_cast<double>(w(q));
    const Eigen::VectorXd column = factor.inverse_column(q);
    const double hinv_qq = column(q);

    WeightUpdate update;
    update.pruned_index = q;
    update.delta = -column * (wq / hinv_qq);
    update.delta(q) = -wq; // exact: column(q) / hinv_qq == 1 up to rounding
    update.error_increase = 0.5 * wq * wq / hinv_qq;
    return update;
}

} // namespace langgeo
