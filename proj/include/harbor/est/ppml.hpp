#ifndef HARBOR_EST_PPML_HPP
#define HARBOR_EST_PPML_HPP

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace harbor::est {

struct PpmlOptions {
    double tol = 1e-10;  // relative log-likelihood change
    int max_iter = 100;
};

struct PpmlFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd se; // cluster-robust
    Eigen::MatrixXd vcov;
    std::vector<std::string> names;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    int n_obs = 0;
    int n_clusters = 0;

    double coef(const std::string& name) const;
    double stderr_of(const std::string& name) const;
};

/// Poisson pseudo-maximum-likelihood, y_i ~ exp(x_i' beta), fitted by
/// iteratively reweighted least squares. Intercept initialization at
/// log(mean y + 0.1), all other coefficients start at zero. Standard errors
/// are CR1 cluster-robust. Binary covariate patterns whose outcomes are all
/// zero (perfect separation) raise NumericError before iterating.
PpmlFit ppml(const Eigen::MatrixXd& X, std::span<const double> y, std::span<const int> cluster_of,
             int n_clusters, const std::vector<std::string>& names, const PpmlOptions& opts = {});

/// Design matrix for the trade regression: intercept, location dummies
/// (west, middle, east; "other" omitted), post, and post x location
/// interactions. Rows align with the inputs.
struct TradeDesign {
    Eigen::MatrixXd X;
    std::vector<std::string> names;
    std::vector<int> cluster_of;
    int n_clusters = 0;
};
TradeDesign build_trade_design(std::span<const int> location_of, std::span<const int> post,
                               std::span<const std::string> port_of);

} // namespace harbor::est

#endif
