#ifndef HARBOR_EST_LINREG_HPP
#define HARBOR_EST_LINREG_HPP

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace harbor::est {

/// Everything the sandwich needs from a fitted linear model. X is the
/// regressor matrix actually used in the solve (for absorbed models that is
/// the demeaned interaction block); k_model counts every parameter of the
/// underlying model including absorbed fixed effects, which enters the
/// small-sample factor.
struct FitInternals {
    const Eigen::MatrixXd& X;
    const Eigen::MatrixXd& xtx_inv;
    std::span<const double> residuals;
    std::span<const int> cluster_of; // dense cluster index per row
    int n_clusters = 0;
    int k_model = 0;
};

/// CR1 cluster-robust standard errors:
/// V = c * (X'X)^-1 [ sum_g s_g s_g' ] (X'X)^-1,  s_g = sum_{i in g} x_i e_i,
/// c = G/(G-1) * (N-1)/(N-K).
Eigen::VectorXd cluster_robust_se(const FitInternals& fit);

/// Full covariance matrix version (used for joint reporting).
Eigen::MatrixXd cluster_robust_vcov(const FitInternals& fit);

/// Least squares via column-pivoted QR. Throws NumericError when X is rank
/// deficient (collinear design).
Eigen::VectorXd ols_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

} // namespace harbor::est

#endif
