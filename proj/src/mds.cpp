#include "langgeo/mds.hpp"

namespace langgeo {

ReconstructionReport reconstruction_report(const MaskedDistanceMatrix& distances, const Embedding& embedding)
{
    if (distances.labels != embedding.labels) {
        throw ValidationError("distance matrix and embedding label lists differ");
    }
    require_complete(distances);

    ReconstructionReport report;
    const Eigen::MatrixXd recon = pairwise_euclidean(embedding.coordinates);
    const Eigen::Index n = distances.size();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double err = std::abs(recon(i, j) - distances.values(i, j));
            report.max_abs_error = std::max(report.max_abs_error, err);
            total += err;
        }
    }
    const Eigen::Index pairs = n * (n - 1) / 2;
    report.mean_abs_error = pairs > 0 ? total / static_cast<double>(pairs) : 0.0;

    const double abs_sum = embedding.eigenvalues.cwiseAbs().sum() + embedding.dropped_spectrum.cwiseAbs().sum();
    const double negative = (-embedding.dropped_spectrum.array()).max(0.0).sum();
    report.negative_eigenvalue_mass = abs_sum > 0.0 ? negative / abs_sum : 0.0;
    return report;
}

} // namespace langgeo
