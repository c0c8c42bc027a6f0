#pragma once

#include <cstdint>

#include "litho/models/common.hpp"
#include "litho/models/model.hpp"

namespace litho::models {

struct MlpParams {
    std::vector<std::size_t> hidden = {100, 500};
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    double step_size = 0.01;
    double momentum = 0.9;
    std::uint64_t seed = 0;
};

// Bare network: rectifier hidden layers, sigmoid output. Exposed separately
// from the Classifier wrapper so tests can finite-difference its gradients.
struct MlpCore {
    std::vector<std::size_t> dims;      // [din, hidden..., 1]
    std::vector<std::vector<double>> W; // [layer][din*dout], row-major
    std::vector<std::vector<double>> b;

    void init(std::span<const std::size_t> layer_dims, std::uint64_t seed);

    // Probabilities for a row-major batch.
    std::vector<double> forward(std::span<const double> X, std::size_t n) const;

    // Mean clamped log-loss over the batch plus parameter gradients
    // (same shapes as W and b).
    double loss_and_grad(std::span<const double> X, std::size_t n,
                         std::span<const std::uint8_t> y, std::vector<std::vector<double>>& gW,
                         std::vector<std::vector<double>>& gb) const;

    std::size_t n_params() const;
    std::vector<double> pack() const;
    void unpack(std::span<const double> flat);
};

// Feed-forward net behind the shared contract; mini-batch SGD with
// momentum, mean imputation + indicators + standardization as in logistic.
class MlpModel final : public Classifier {
public:
    explicit MlpModel(MlpParams params = {}) : params_(params) {}

    std::string family() const override { return "mlp"; }
    void fit(const features::FeatureMatrix& m) override;
    std::vector<double> predict_proba(const features::FeatureMatrix& m) const override;
    const std::vector<std::string>& schema() const override { return prep_.schema; }

    nlohmann::json save_header(std::vector<double>& blob) const override;
    void load(const nlohmann::json& header, std::span<const double> blob) override;

    const MlpCore& core() const { return core_; }
    const std::vector<double>& epoch_loss() const { return epoch_loss_; }

private:
    MlpParams params_;
    DensePrep prep_;
    MlpCore core_;
    std::vector<double> epoch_loss_;
};

// Uninformative baseline: always emits the training class-1 share.
class PriorModel final : public Classifier {
public:
    std::string family() const override { return "prior"; }
    void fit(const features::FeatureMatrix& m) override;
    std::vector<double> predict_proba(const features::FeatureMatrix& m) const override;
    const std::vector<std::string>& schema() const override { return schema_; }

    nlohmann::json save_header(std::vector<double>& blob) const override;
    void load(const nlohmann::json& header, std::span<const double> blob) override;

    double prior() const { return prior_; }

private:
    std::vector<std::string> schema_;
    double prior_ = 0.5;
};

} // namespace litho::models
