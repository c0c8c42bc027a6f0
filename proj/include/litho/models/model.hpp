#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "litho/features.hpp"

namespace litho::models {

// Uniform contract for all classifier families: fit on a FeatureMatrix,
// emit per-row probability of class 1. Fitted models are immutable and
// safe for concurrent prediction.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual std::string family() const = 0;
    virtual void fit(const features::FeatureMatrix& m) = 0;
    virtual std::vector<double> predict_proba(const features::FeatureMatrix& m) const = 0;

    virtual const std::vector<std::string>& schema() const = 0;

    // Structure goes to the JSON header, every real-valued parameter to the
    // binary blob so round-trips are exact.
    virtual nlohmann::json save_header(std::vector<double>& blob) const = 0;
    virtual void load(const nlohmann::json& header, std::span<const double> blob) = 0;
};

// family: "prior" | "logistic" | "gbdt" | "mlp". params: the family's
// sub-object from the run config (may be empty for defaults). seed feeds
// the stochastic families.
std::unique_ptr<Classifier> make_classifier(const std::string& family,
                                            const nlohmann::json& params, std::uint64_t seed);

// Writes <dir>/model.json and <dir>/model.bin.
void save_model(const std::string& dir, const Classifier& model);
std::unique_ptr<Classifier> load_model(const std::string& dir);

// Throws DataError listing missing/extra columns unless the matrix carries
// exactly the model's schema.
void check_schema(const std::vector<std::string>& schema, const features::FeatureMatrix& m);

double sigmoid(double eta);

// Probability clamp used for loss computation only; raw probabilities are
// reported unclamped.
double clamp_proba(double p);

} // namespace litho::models
