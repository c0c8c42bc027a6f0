#pragma once

#include "litho/models/common.hpp"
#include "litho/models/model.hpp"

namespace litho::models {

struct LogisticParams {
    double l2_penalty = 0.0; // best paper configuration uses none
    std::size_t max_iters = 10000;
    double grad_tol = 1e-6; // max-norm convergence threshold
};

// Maximum-likelihood logistic regression trained by full-batch gradient
// descent with backtracking line search on standardized, mean-imputed
// inputs (indicator columns carry the missingness).
class LogisticModel final : public Classifier {
public:
    explicit LogisticModel(LogisticParams params = {}) : params_(params) {}

    std::string family() const override { return "logistic"; }
    void fit(const features::FeatureMatrix& m) override;
    std::vector<double> predict_proba(const features::FeatureMatrix& m) const override;
    const std::vector<std::string>& schema() const override { return prep_.schema; }

    nlohmann::json save_header(std::vector<double>& blob) const override;
    void load(const nlohmann::json& header, std::span<const double> blob) override;

    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    std::size_t iterations_run() const { return iterations_; }
    bool converged() const { return converged_; }

private:
    LogisticParams params_;
    DensePrep prep_;
    std::vector<double> weights_; // one per dense column
    double bias_ = 0.0;
    std::size_t iterations_ = 0;
    bool converged_ = false;
};

} // namespace litho::models
