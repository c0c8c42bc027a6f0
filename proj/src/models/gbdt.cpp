#include "litho/models/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "litho/kernels.hpp"
#include "litho/seeds.hpp"

namespace litho::models {

void GbdtParams::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("gbdt: learning_rate must be > 0");
    if (max_depth < 1) throw ConfigError("gbdt: max_depth must be >= 1");
    if (!(subspace_share > 0.0 && subspace_share <= 1.0))
        throw ConfigError("gbdt: subspace_share must be in (0, 1]");
    if (!(subsample_rate > 0.0 && subsample_rate <= 1.0))
        throw ConfigError("gbdt: subsample_rate must be in (0, 1]");
    if (min_leaf < 1) throw ConfigError("gbdt: min_leaf must be >= 1");
}

double Tree::predict(const RawColumns& cols, std::size_t row) const {
    int at = 0;
    while (true) {
        const TreeNode& node = nodes[static_cast<std::size_t>(at)];
        if (node.feature < 0) return node.value;
        const auto f = static_cast<std::size_t>(node.feature);
        bool go_left;
        if (!cols.present[f][row]) {
            go_left = node.default_left;
        } else {
            go_left = cols.values[f][row] < node.threshold;
        }
        at = go_left ? node.left : node.right;
    }
}

std::size_t Tree::depth() const {
    // Depth in edges; iterative to keep recursion out of hot asserts.
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
        auto [idx, d] = stack.back();
        stack.pop_back();
        const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
        if (node.feature < 0) {
            best = std::max(best, d);
            continue;
        }
        stack.push_back({node.left, d + 1});
        stack.push_back({node.right, d + 1});
    }
    return best;
}

namespace {

constexpr double kMinGain = 1e-12;
constexpr double kHessFloor = 1e-16;

struct TreeBuilder {
    const RawColumns& cols;
    const std::vector<double>& grad;
    const std::vector<double>& hess;
    const std::vector<int>& features;
    const GbdtParams& params;
    Tree tree;

    int build(std::vector<std::uint32_t> rows, std::size_t depth) {
        double g_sum = 0.0, h_sum = 0.0;
        for (std::uint32_t r : rows) {
            g_sum += grad[r];
            h_sum += hess[r];
        }
        const int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});

        kernels::SplitCandidate best;
        if (depth < params.max_depth && rows.size() >= 2 * params.min_leaf) {
            kernels::SplitScanInput in;
            in.values = &cols.values;
            in.present = &cols.present;
            in.rows = &rows;
            in.grad = &grad;
            in.hess = &hess;
            in.features = &features;
            in.min_leaf = params.min_leaf;
            best = kernels::best_split(in);
        }

        if (best.gain <= kMinGain) {
            tree.nodes[static_cast<std::size_t>(idx)].feature = -1;
            tree.nodes[static_cast<std::size_t>(idx)].value = -g_sum / std::max(h_sum, kHessFloor);
            return idx;
        }

        std::vector<std::uint32_t> left, right;
        left.reserve(rows.size());
        right.reserve(rows.size());
        const auto f = static_cast<std::size_t>(best.feature);
        for (std::uint32_t r : rows) {
            const bool go_left =
                cols.present[f][r] ? (cols.values[f][r] < best.threshold) : best.default_left;
            (go_left ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        const int li = build(std::move(left), depth + 1);
        const int ri = build(std::move(right), depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(idx)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.default_left = best.default_left;
        node.left = li;
        node.right = ri;
        return idx;
    }
};

} // namespace

void GbdtModel::fit(const features::FeatureMatrix& m) {
    params_.validate();
    require_both_classes(m, family());

    schema_ = m.columns;
    const RawColumns cols = gather_columns(m, schema_);
    const std::size_t n = m.n_rows();
    const std::size_t d = schema_.size();

    // Class weights: boosting already reweights hard rows; the optional
    // explicit weighting scales the minority class to parity.
    std::vector<double> w(n, 1.0);
    std::size_t ones = 0;
    for (std::uint8_t y : m.target) ones += (y == 1);
    if (params_.class_weighting) {
        const std::size_t zeros = n - ones;
        const bool minority_is_one = ones <= zeros;
        const double ratio = minority_is_one
                                 ? static_cast<double>(zeros) / static_cast<double>(ones)
                                 : static_cast<double>(ones) / static_cast<double>(zeros);
        for (std::size_t i = 0; i < n; ++i) {
            const bool is_minority = minority_is_one ? m.target[i] == 1 : m.target[i] == 0;
            if (is_minority) w[i] = ratio;
        }
    }

    double w_sum = 0.0, wy_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w_sum += w[i];
        wy_sum += w[i] * (m.target[i] ? 1.0 : 0.0);
    }
    const double prior = clamp_proba(wy_sum / w_sum);
    init_score_ = std::log(prior / (1.0 - prior));

    std::vector<double> score(n, init_score_);
    std::vector<double> grad(n), hess(n);
    trees_.clear();
    loss_trace_.clear();

    auto record_loss = [&]() {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = clamp_proba(sigmoid(score[i]));
            loss += w[i] * (m.target[i] ? -std::log(p) : -std::log(1.0 - p));
        }
        loss_trace_.push_back(loss / w_sum);
    };
    record_loss();

    std::vector<int> all_features(d);
    std::iota(all_features.begin(), all_features.end(), 0);
    std::vector<std::uint32_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0);

    for (std::size_t t = 0; t < params_.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(score[i]);
            grad[i] = w[i] * (p - (m.target[i] ? 1.0 : 0.0));
            hess[i] = w[i] * p * (1.0 - p);
        }

        std::mt19937_64 rng(derive_seed(params_.seed, "tree", t));
        std::vector<std::uint32_t> rows = all_rows;
        if (params_.subsample_rate < 1.0) {
            std::shuffle(rows.begin(), rows.end(), rng);
            const auto k = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::floor(params_.subsample_rate *
                                                       static_cast<double>(n))));
            rows.resize(k);
            std::sort(rows.begin(), rows.end());
        }
        std::vector<int> feats = all_features;
        if (params_.subspace_share < 1.0) {
            std::shuffle(feats.begin(), feats.end(), rng);
            const auto k = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::llround(params_.subspace_share *
                                                         static_cast<double>(d))));
            feats.resize(std::min(k, d));
            std::sort(feats.begin(), feats.end());
        }

        TreeBuilder builder{cols, grad, hess, feats, params_, {}};
        builder.build(std::move(rows), 0);
        trees_.push_back(std::move(builder.tree));

        const Tree& tree = trees_.back();
        for (std::size_t i = 0; i < n; ++i)
            score[i] += params_.learning_rate * tree.predict(cols, i);
        record_loss();
    }
}

std::vector<double> GbdtModel::predict_proba(const features::FeatureMatrix& m) const {
    const RawColumns cols = gather_columns(m, schema_);
    const std::size_t n = m.n_rows();
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = init_score_;
        for (const Tree& tree : trees_) s += params_.learning_rate * tree.predict(cols, i);
        p[i] = sigmoid(s);
    }
    return p;
}

nlohmann::json GbdtModel::save_header(std::vector<double>& blob) const {
    nlohmann::json j;
    j["schema"] = schema_;
    j["params"] = {{"learning_rate", params_.learning_rate},
                   {"n_trees", params_.n_trees},
                   {"max_depth", params_.max_depth},
                   {"subspace_share", params_.subspace_share},
                   {"subsample_rate", params_.subsample_rate},
                   {"min_leaf", params_.min_leaf},
                   {"class_weighting", params_.class_weighting},
                   {"seed", params_.seed}};
    blob.push_back(init_score_);
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& t : trees_) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& nd : t.nodes) {
            nodes.push_back({nd.feature, nd.left, nd.right, nd.default_left ? 1 : 0});
            blob.push_back(nd.feature < 0 ? nd.value : nd.threshold);
        }
        trees.push_back({{"nodes", nodes}});
    }
    j["trees"] = trees;
    return j;
}

void GbdtModel::load(const nlohmann::json& header, std::span<const double> blob) {
    schema_ = header.at("schema").get<std::vector<std::string>>();
    const auto& p = header.at("params");
    params_.learning_rate = p.at("learning_rate").get<double>();
    params_.n_trees = p.at("n_trees").get<std::size_t>();
    params_.max_depth = p.at("max_depth").get<std::size_t>();
    params_.subspace_share = p.at("subspace_share").get<double>();
    params_.subsample_rate = p.at("subsample_rate").get<double>();
    params_.min_leaf = p.at("min_leaf").get<std::size_t>();
    params_.class_weighting = p.at("class_weighting").get<bool>();
    params_.seed = p.at("seed").get<std::uint64_t>();

    std::size_t pos = 0;
    auto next = [&]() {
        if (pos >= blob.size()) throw DataError("gbdt model blob truncated");
        return blob[pos++];
    };
    init_score_ = next();
    trees_.clear();
    for (const auto& tj : header.at("trees")) {
        Tree t;
        for (const auto& nj : tj.at("nodes")) {
            TreeNode nd;
            nd.feature = nj.at(0).get<int>();
            nd.left = nj.at(1).get<int>();
            nd.right = nj.at(2).get<int>();
            nd.default_left = nj.at(3).get<int>() != 0;
            const double v = next();
            if (nd.feature < 0) {
                nd.value = v;
            } else {
                nd.threshold = v;
            }
            t.nodes.push_back(nd);
        }
        trees_.push_back(std::move(t));
    }
}

} // namespace litho::models
