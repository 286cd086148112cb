#include "harbor/est/ppml.hpp"

#include "harbor/est/linreg.hpp"
#include "harbor/util/errors.hpp"

#include <cmath>
#include <map>

namespace harbor::est {

double PpmlFit::coef(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return beta[static_cast<Eigen::Index>(i)];
    }
    throw DataError("ppml: no coefficient named '" + name + "'");
}

double PpmlFit::stderr_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return se[static_cast<Eigen::Index>(i)];
    }
    throw DataError("ppml: no coefficient named '" + name + "'");
}

namespace {

bool is_binary_column(const Eigen::MatrixXd& X, Eigen::Index col) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double v = X(i, col);
        if (v != 0.0 && v != 1.0) return false;
    }
    return true;
}

void check_separation(const Eigen::MatrixXd& X, std::span<const double> y,
                      const std::vector<std::string>& names) {
    for (Eigen::Index k = 0; k < X.cols(); ++k) {
        if (!is_binary_column(X, k)) continue;
        bool any_on = false;
        double sum_on = 0.0;
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            if (X(i, k) == 1.0) {
                any_on = true;
                sum_on += y[static_cast<std::size_t>(i)];
            }
        }
        if (any_on && sum_on == 0.0) {
            throw NumericError("ppml: separation detected, covariate '" +
                               names[static_cast<std::size_t>(k)] +
                               "' only switches on where the outcome is all zero");
        }
    }
}

double poisson_loglik(const Eigen::VectorXd& eta, std::span<const double> y) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        ll += y[static_cast<std::size_t>(i)] * eta[i] - std::exp(eta[i]);
    }
    return ll;
}

} // namespace

PpmlFit ppml(const Eigen::MatrixXd& X, std::span<const double> y, std::span<const int> cluster_of,
             int n_clusters, const std::vector<std::string>& names, const PpmlOptions& opts) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (static_cast<std::size_t>(n) != y.size() || y.size() != cluster_of.size()) {
        throw ConfigError("ppml: input size mismatch");
    }
    if (static_cast<std::size_t>(k) != names.size()) {
        throw ConfigError("ppml: coefficient name count mismatch");
    }
    double ymean = 0.0;
    for (double v : y) {
        if (v < 0.0) throw DataError("ppml: negative outcome");
        ymean += v;
    }
    ymean /= static_cast<double>(n);

    check_separation(X, y, names);

    // Intercept column gets the log-mean start; everything else zero.
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    for (Eigen::Index c = 0; c < k; ++c) {
        if ((X.col(c).array() == 1.0).all()) {
            beta[c] = std::log(ymean + 0.1);
            break;
        }
    }

    Eigen::VectorXd eta = X * beta;
    double ll = poisson_loglik(eta, y);
    PpmlFit fit;
    fit.names = names;
    fit.n_obs = static_cast<int>(n);
    fit.n_clusters = n_clusters;

    Eigen::VectorXd mu(n), z(n);
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        mu = eta.array().exp();
        // Working response z = eta + (y - mu) / mu; weighted LS with W = mu.
        Eigen::VectorXd sqrt_w = mu.cwiseSqrt();
        for (Eigen::Index i = 0; i < n; ++i) {
            z[i] = eta[i] + (y[static_cast<std::size_t>(i)] - mu[i]) / mu[i];
        }
        const Eigen::MatrixXd Xw = sqrt_w.asDiagonal() * X;
        const Eigen::VectorXd zw = sqrt_w.asDiagonal() * z;
        beta = ols_solve(Xw, zw);
        eta = X * beta;
        if (!eta.allFinite() || beta.cwiseAbs().maxCoeff() > 30.0) {
            throw NumericError("ppml: diverging coefficients (likely separation)");
        }
        const double ll_new = poisson_loglik(eta, y);
        const double rel = std::fabs(ll_new - ll) / (std::fabs(ll) + 0.1);
        ll = ll_new;
        if (rel < opts.tol) {
            fit.converged = true;
            ++iter;
            break;
        }
    }
    fit.iterations = iter;
    fit.loglik = ll;
    fit.beta = beta;
    if (!fit.converged) {
        throw NumericError("ppml: IRLS did not converge in " + std::to_string(opts.max_iter) +
                           " iterations");
    }

    // Sandwich at the converged fit: bread (X' diag(mu) X)^-1, scores x_i(y_i - mu_i).
    mu = eta.array().exp();
    const Eigen::MatrixXd info = X.transpose() * mu.asDiagonal() * X;
    const Eigen::MatrixXd bread = info.inverse();
    std::vector<double> resid(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        resid[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] - mu[i];
    }
    FitInternals internals{X, bread, resid, cluster_of, n_clusters, static_cast<int>(k)};
    fit.vcov = cluster_robust_vcov(internals);
    fit.se = fit.vcov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return fit;
}

TradeDesign build_trade_design(std::span<const int> location_of, std::span<const int> post,
                               std::span<const std::string> port_of) {
    const std::size_t n = location_of.size();
    if (post.size() != n || port_of.size() != n) {
        throw ConfigError("trade design: input size mismatch");
    }
    TradeDesign d;
    d.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 8);
    d.names = {"intercept", "west",      "middle",      "east",
               "post",      "post_west", "post_middle", "post_east"};
    std::map<std::string, int> port_index;
    d.cluster_of.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int loc = location_of[i]; // 0 west, 1 middle, 2 east, 3 other
        const double p = post[i] ? 1.0 : 0.0;
        d.X(static_cast<Eigen::Index>(i), 0) = 1.0;
        if (loc >= 0 && loc <= 2) {
            d.X(static_cast<Eigen::Index>(i), 1 + loc) = 1.0;
            d.X(static_cast<Eigen::Index>(i), 5 + loc) = p;
        }
        d.X(static_cast<Eigen::Index>(i), 4) = p;
        auto [it, inserted] = port_index.emplace(port_of[i], static_cast<int>(port_index.size()));
        d.cluster_of[i] = it->second;
    }
    d.n_clusters = static_cast<int>(port_index.size());
    return d;
}

} // namespace harbor::est
