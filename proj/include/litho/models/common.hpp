#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "litho/features.hpp"

namespace litho::models {

// Dense design matrix for the families that cannot branch on missingness
// (logistic, MLP): per-feature training-mean imputation, a missing-indicator
// column per feature, then standardization of every resulting column.
// Layout: [d imputed features | d indicators], row-major.
struct DensePrep {
    std::vector<std::string> schema;
    std::vector<double> impute_mean; // per source feature
    std::vector<double> center;      // per dense column (2d)
    std::vector<double> scale;       // per dense column, 1 where constant

    static DensePrep fit(const features::FeatureMatrix& m);
    std::vector<double> transform(const features::FeatureMatrix& m) const;
    std::size_t dense_dim() const { return schema.size() * 2; }
};

// Column-major raw views in schema order, for the tree family.
struct RawColumns {
    std::vector<std::vector<double>> values;
    std::vector<std::vector<std::uint8_t>> present;
};
RawColumns gather_columns(const features::FeatureMatrix& m, const std::vector<std::string>& schema);

void require_both_classes(const features::FeatureMatrix& m, const std::string& family);

} // namespace litho::models
