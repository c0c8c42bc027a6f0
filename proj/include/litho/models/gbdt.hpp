#pragma once

#include <cstdint>

#include "litho/models/common.hpp"
#include "litho/models/model.hpp"

namespace litho::models {

struct GbdtParams {
    double learning_rate = 0.05;
    std::size_t n_trees = 100;
    std::size_t max_depth = 3;
    double subspace_share = 0.8; // share of features per tree
    double subsample_rate = 0.55; // share of rows per tree
    std::size_t min_leaf = 20;
    bool class_weighting = false;
    std::uint64_t seed = 0;

    void validate() const;
};

// One node of a regression tree. Internal nodes carry a split and a default
// branch for missing values; leaves carry a Newton-step score.
struct TreeNode {
    int feature = -1; // -1: leaf
    double threshold = 0.0;
    bool default_left = true;
    int left = -1;
    int right = -1;
    double value = 0.0; // leaf score
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(const RawColumns& cols, std::size_t row) const;
    std::size_t depth() const;
};

// Gradient boosting on regression trees over the logistic loss: stagewise
// Newton steps on the prior log-odds, exact greedy splits over gradient and
// hessian statistics, sparsity-aware default directions.
class GbdtModel final : public Classifier {
public:
    explicit GbdtModel(GbdtParams params = {}) : params_(params) {}

    std::string family() const override { return "gbdt"; }
    void fit(const features::FeatureMatrix& m) override;
    std::vector<double> predict_proba(const features::FeatureMatrix& m) const override;
    const std::vector<std::string>& schema() const override { return schema_; }

    nlohmann::json save_header(std::vector<double>& blob) const override;
    void load(const nlohmann::json& header, std::span<const double> blob) override;

    const std::vector<Tree>& trees() const { return trees_; }
    double init_score() const { return init_score_; }
    // Weighted mean training log-loss after each stage (index 0 = prior only).
    const std::vector<double>& loss_trace() const { return loss_trace_; }
    const GbdtParams& params() const { return params_; }

private:
    GbdtParams params_;
    std::vector<std::string> schema_;
    double init_score_ = 0.0;
    std::vector<Tree> trees_;
    std::vector<double> loss_trace_;
};

} // namespace litho::models
