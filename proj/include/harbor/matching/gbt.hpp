#ifndef HARBOR_MATCHING_GBT_HPP
#define HARBOR_MATCHING_GBT_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace harbor::matching {

/// Per-parish soil composition and treatment flag.
struct SoilFeatureRow {
    std::string parish_id;
    std::vector<double> soil_shares;
    int treated = 0;
};

struct SoilData {
    std::vector<SoilFeatureRow> rows;
    std::vector<std::string> feature_names;
};

SoilData read_soil_csv(const std::filesystem::path& path);

/// Drops soil types present (share > 0) in fewer than min_presence of
/// parishes; guards the propensity model against fingerprinting rare types.
SoilData filter_soil_features(const SoilData& data, double min_presence = 0.10);

struct GbtOptions {
    int max_depth = 3;
    int rounds = 200;
    double learning_rate = 0.1;
    double subsample = 1.0;
    double reg_lambda = 1.0;
    double min_child_weight = 1e-3;
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;
    double predict(std::span<const double> x) const;
};

/// Boosted depth-limited regression trees with a logistic link; exact greedy
/// splits on presorted features, second-order (Newton) gain. Predictions are
/// strictly inside (0, 1).
class PropensityModel {
public:
    double predict(std::span<const double> x) const;
    std::vector<double> predict_all(const Eigen::MatrixXd& X) const;
    /// Raw additive score before the logistic link.
    double raw_score(std::span<const double> x) const;

    int rounds() const { return static_cast<int>(trees_.size()); }
    /// Training log-loss after each boosting round.
    const std::vector<double>& training_loss() const { return loss_per_round_; }

    friend PropensityModel fit_propensity(const Eigen::MatrixXd& X, std::span<const int> y,
                                          const GbtOptions& opts);

private:
    std::vector<RegressionTree> trees_;
    double base_score_ = 0.0; // log-odds of the base rate
    double learning_rate_ = 0.1;
    std::vector<double> loss_per_round_;
};

/// Fits the boosted-tree propensity model. Requires both classes present
/// and at least one feature.
PropensityModel fit_propensity(const Eigen::MatrixXd& X, std::span<const int> y,
                               const GbtOptions& opts = {});

/// Mean logistic loss of probability predictions.
double logistic_loss(std::span<const double> p, std::span<const int> y);

/// Newton-Raphson logistic regression (ablation fallback for the
/// propensity score); returns coefficients with leading intercept.
Eigen::VectorXd fit_logistic_regression(const Eigen::MatrixXd& X, std::span<const int> y,
                                        int max_iter = 100, double tol = 1e-10);
std::vector<double> predict_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta);

} // namespace harbor::matching

#endif
