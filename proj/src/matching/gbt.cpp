#include "harbor/matching/gbt.hpp"

#include "harbor/util/csv.hpp"
#include "harbor/util/errors.hpp"
#include "harbor/util/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace harbor::matching {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct SplitCandidate {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

struct TreeBuilder {
    const Eigen::MatrixXd& X;
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    const GbtOptions& opts;
    // Row indices sorted per feature, shared across the whole boosting run.
    const std::vector<std::vector<int>>& sorted_rows;

    RegressionTree tree;

    static double leaf_weight(double g, double h, double lambda) {
        return -g / (h + lambda);
    }
    static double score(double g, double h, double lambda) {
        return g * g / (h + lambda);
    }

    SplitCandidate best_split(const std::vector<char>& in_node, double g_total, double h_total) {
        SplitCandidate best;
        const int n_features = static_cast<int>(X.cols());
        for (int f = 0; f < n_features; ++f) {
            double g_left = 0.0, h_left = 0.0;
            double prev_value = 0.0;
            bool have_prev = false;
            for (int row : sorted_rows[f]) {
                if (!in_node[row]) continue;
                const double value = X(row, f);
                if (have_prev && value > prev_value) {
                    const double g_right = g_total - g_left;
                    const double h_right = h_total - h_left;
                    if (h_left >= opts.min_child_weight && h_right >= opts.min_child_weight) {
                        const double gain = 0.5 * (score(g_left, h_left, opts.reg_lambda) +
                                                   score(g_right, h_right, opts.reg_lambda) -
                                                   score(g_total, h_total, opts.reg_lambda));
                        if (gain > best.gain + 1e-12) {
                            best.gain = gain;
                            best.feature = f;
                            best.threshold = 0.5 * (prev_value + value);
                        }
                    }
                }
                g_left += grad[row];
                h_left += hess[row];
                prev_value = value;
                have_prev = true;
            }
        }
        return best;
    }

    int build_node(const std::vector<char>& in_node, double g_total, double h_total, int depth) {
        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (depth < opts.max_depth) {
            const SplitCandidate split = best_split(in_node, g_total, h_total);
            if (split.feature >= 0) {
                std::vector<char> left(in_node.size(), 0), right(in_node.size(), 0);
                double gl = 0.0, hl = 0.0;
                for (std::size_t row = 0; row < in_node.size(); ++row) {
                    if (!in_node[row]) continue;
                    if (X(static_cast<Eigen::Index>(row), split.feature) <= split.threshold) {
                        left[row] = 1;
                        gl += grad[row];
                        hl += hess[row];
                    } else {
                        right[row] = 1;
                    }
                }
                const int l = build_node(left, gl, hl, depth + 1);
                const int r = build_node(right, g_total - gl, h_total - hl, depth + 1);
                tree.nodes[node_id].feature = split.feature;
                tree.nodes[node_id].threshold = split.threshold;
                tree.nodes[node_id].left = l;
                tree.nodes[node_id].right = r;
                return node_id;
            }
        }
        tree.nodes[node_id].leaf_value = leaf_weight(g_total, h_total, opts.reg_lambda);
        return node_id;
    }
};

} // namespace

double RegressionTree::predict(std::span<const double> x) const {
    int i = 0;
    while (nodes[i].feature >= 0) {
        i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    }
    return nodes[i].leaf_value;
}

double PropensityModel::raw_score(std::span<const double> x) const {
    double score = base_score_;
    for (const RegressionTree& tree : trees_) {
        score += learning_rate_ * tree.predict(x);
    }
    return score;
}

double PropensityModel::predict(std::span<const double> x) const {
    return sigmoid(raw_score(x));
}

std::vector<double> PropensityModel::predict_all(const Eigen::MatrixXd& X) const {
    std::vector<double> out(static_cast<std::size_t>(X.rows()));
    std::vector<double> row(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) row[static_cast<std::size_t>(j)] = X(i, j);
        out[static_cast<std::size_t>(i)] = predict(row);
    }
    return out;
}

double logistic_loss(std::span<const double> p, std::span<const int> y) {
    double loss = 0.0;
    constexpr double eps = 1e-15;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = std::clamp(p[i], eps, 1.0 - eps);
        loss += y[i] ? -std::log(pi) : -std::log(1.0 - pi);
    }
    return loss / static_cast<double>(p.size());
}

PropensityModel fit_propensity(const Eigen::MatrixXd& X, std::span<const int> y,
                               const GbtOptions& opts) {
    const int n = static_cast<int>(X.rows());
    if (n == 0 || static_cast<std::size_t>(n) != y.size()) {
        throw ConfigError("fit_propensity: size mismatch");
    }
    if (X.cols() == 0) throw DataError("fit_propensity: empty feature set after filtering");
    const long positives = std::accumulate(y.begin(), y.end(), 0L);
    if (positives == 0 || positives == n) {
        throw DataError("fit_propensity: both classes must be present");
    }
    if (opts.rounds < 1 || opts.max_depth < 1 || opts.learning_rate <= 0.0 ||
        opts.subsample <= 0.0 || opts.subsample > 1.0) {
        throw ConfigError("fit_propensity: bad hyperparameters");
    }

    PropensityModel model;
    const double base_rate = static_cast<double>(positives) / n;
    model.base_score_ = std::log(base_rate / (1.0 - base_rate));
    model.learning_rate_ = opts.learning_rate;

    std::vector<std::vector<int>> sorted_rows(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index f = 0; f < X.cols(); ++f) {
        auto& order = sorted_rows[static_cast<std::size_t>(f)];
        order.resize(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&X, f](int a, int b) { return X(a, f) < X(b, f); });
    }

    std::vector<double> raw(static_cast<std::size_t>(n), model.base_score_);
    std::vector<double> grad(static_cast<std::size_t>(n)), hess(static_cast<std::size_t>(n));
    std::vector<double> prob(static_cast<std::size_t>(n));
    std::vector<double> row(static_cast<std::size_t>(X.cols()));
    Rng rng(opts.seed);

    for (int round = 0; round < opts.rounds; ++round) {
        std::vector<char> in_root(static_cast<std::size_t>(n), 1);
        if (opts.subsample < 1.0) {
            for (auto& flag : in_root) flag = rng.next_unit() < opts.subsample ? 1 : 0;
        }
        double g_total = 0.0, h_total = 0.0;
        for (int i = 0; i < n; ++i) {
            const double p = sigmoid(raw[i]);
            grad[i] = p - y[i];
            hess[i] = std::max(p * (1.0 - p), 1e-16);
            if (in_root[i]) {
                g_total += grad[i];
                h_total += hess[i];
            }
        }

        TreeBuilder builder{X, grad, hess, opts, sorted_rows, {}};
        builder.build_node(in_root, g_total, h_total, 0);
        model.trees_.push_back(std::move(builder.tree));

        for (int i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < X.cols(); ++j) row[static_cast<std::size_t>(j)] = X(i, j);
            raw[i] += opts.learning_rate * model.trees_.back().predict(row);
            prob[i] = sigmoid(raw[i]);
        }
        model.loss_per_round_.push_back(logistic_loss(prob, y));
    }
    return model;
}

Eigen::VectorXd fit_logistic_regression(const Eigen::MatrixXd& X, std::span<const int> y,
                                        int max_iter, double tol) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd Xi(n, X.cols() + 1);
    Xi.col(0).setOnes();
    Xi.rightCols(X.cols()) = X;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(Xi.cols());
    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::VectorXd eta = Xi * beta;
        Eigen::VectorXd p(n), w(n), z(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            p[i] = sigmoid(eta[i]);
            w[i] = std::max(p[i] * (1.0 - p[i]), 1e-12);
            z[i] = y[static_cast<std::size_t>(i)] - p[i];
        }
        const Eigen::MatrixXd H = Xi.transpose() * w.asDiagonal() * Xi +
                                  1e-10 * Eigen::MatrixXd::Identity(Xi.cols(), Xi.cols());
        const Eigen::VectorXd step = H.ldlt().solve(Xi.transpose() * z);
        beta += step;
        if (step.cwiseAbs().maxCoeff() < tol) break;
    }
    return beta;
}

std::vector<double> predict_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
    std::vector<double> out(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double eta = beta[0];
        for (Eigen::Index j = 0; j < X.cols(); ++j) eta += X(i, j) * beta[j + 1];
        out[static_cast<std::size_t>(i)] = sigmoid(eta);
    }
    return out;
}

SoilData read_soil_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t c_id = t.col("parish_id");
    const std::size_t c_treated = t.col("treated");
    SoilData data;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (c == c_id || c == c_treated) continue;
        feature_cols.push_back(c);
        data.feature_names.push_back(t.header[c]);
    }
    for (const auto& row : t.rows) {
        SoilFeatureRow r;
        r.parish_id = row[c_id];
        r.treated = parse_long(row[c_treated], path.string()) != 0;
        double total = 0.0;
        for (std::size_t c : feature_cols) {
            const double share = parse_double(row[c], path.string());
            if (share < 0.0) throw DataError("soil csv: negative share for " + r.parish_id);
            total += share;
            r.soil_shares.push_back(share);
        }
        if (total > 1.0 + 1e-6) {
            throw DataError("soil csv: shares sum to " + std::to_string(total) + " for " +
                            r.parish_id);
        }
        data.rows.push_back(std::move(r));
    }
    return data;
}

SoilData filter_soil_features(const SoilData& data, double min_presence) {
    if (data.rows.empty()) return data;
    const std::size_t n_features = data.feature_names.size();
    std::vector<long> present(n_features, 0);
    for (const auto& row : data.rows) {
        for (std::size_t f = 0; f < n_features; ++f) {
            if (row.soil_shares[f] > 0.0) present[f] += 1;
        }
    }
    const double threshold = min_presence * static_cast<double>(data.rows.size());
    std::vector<std::size_t> keep;
    for (std::size_t f = 0; f < n_features; ++f) {
        if (static_cast<double>(present[f]) >= threshold) keep.push_back(f);
    }
    SoilData out;
    for (std::size_t f : keep) out.feature_names.push_back(data.feature_names[f]);
    for (const auto& row : data.rows) {
        SoilFeatureRow r;
        r.parish_id = row.parish_id;
        r.treated = row.treated;
        for (std::size_t f : keep) r.soil_shares.push_back(row.soil_shares[f]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

} // namespace harbor::matching
