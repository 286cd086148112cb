#include "harbor/est/linreg.hpp"

#include "harbor/util/errors.hpp"

#include <cmath>

namespace harbor::est {

Eigen::MatrixXd cluster_robust_vcov(const FitInternals& fit) {
    const Eigen::Index k = fit.X.cols();
    const Eigen::Index n = fit.X.rows();
    if (fit.n_clusters < 2) {
        throw NumericError("cluster_robust_se: need at least 2 clusters");
    }

    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(fit.n_clusters, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        scores.row(fit.cluster_of[static_cast<std::size_t>(i)]) +=
            fit.X.row(i) * fit.residuals[static_cast<std::size_t>(i)];
    }
    const Eigen::MatrixXd meat = scores.transpose() * scores;

    const double g = static_cast<double>(fit.n_clusters);
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(fit.k_model);
    if (nn <= kk) {
        // Saturated model: residuals are identically zero and so is the
        // sandwich; anything else has no residual degrees of freedom.
        if (meat.cwiseAbs().maxCoeff() < 1e-16) {
            return Eigen::MatrixXd::Zero(k, k);
        }
        throw NumericError("cluster_robust_se: no residual degrees of freedom");
    }
    const double c = g / (g - 1.0) * (nn - 1.0) / (nn - kk);

    return c * fit.xtx_inv * meat * fit.xtx_inv;
}

Eigen::VectorXd cluster_robust_se(const FitInternals& fit) {
    return cluster_robust_vcov(fit).diagonal().cwiseMax(0.0).cwiseSqrt();
}

Eigen::VectorXd ols_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) {
        throw NumericError("ols: singular design matrix (rank " + std::to_string(qr.rank()) +
                           " of " + std::to_string(X.cols()) + " columns)");
    }
    return qr.solve(y);
}

} // namespace harbor::est
