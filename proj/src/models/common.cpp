#include "litho/models/common.hpp"

#include <cmath>

#include "litho/models/model.hpp"

namespace litho::models {

double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

double clamp_proba(double p) {
    constexpr double lo = 1e-12;
    return p < lo ? lo : (p > 1.0 - lo ? 1.0 - lo : p);
}

void check_schema(const std::vector<std::string>& schema, const features::FeatureMatrix& m) {
    std::string missing, extra;
    for (const std::string& s : schema) {
        if (m.column_index(s) < 0) missing += " " + s;
    }
    for (const std::string& c : m.columns) {
        bool found = false;
        for (const std::string& s : schema) {
            if (s == c) {
                found = true;
                break;
            }
        }
        if (!found) extra += " " + c;
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "feature schema mismatch;";
        if (!missing.empty()) msg += " missing:" + missing;
        if (!extra.empty()) msg += " extra:" + extra;
        throw DataError(msg);
    }
}

void require_both_classes(const features::FeatureMatrix& m, const std::string& family) {
    std::size_t ones = 0;
    for (std::uint8_t y : m.target) ones += (y == 1);
    if (m.n_rows() == 0 || ones == 0 || ones == m.n_rows())
        throw TrainError(family + ": training data must contain both classes");
}

RawColumns gather_columns(const features::FeatureMatrix& m,
                          const std::vector<std::string>& schema) {
    check_schema(schema, m);
    RawColumns out;
    out.values.reserve(schema.size());
    out.present.reserve(schema.size());
    for (const std::string& name : schema) {
        const auto idx = static_cast<std::size_t>(m.column_index(name));
        out.values.push_back(m.values[idx]);
        out.present.push_back(m.present[idx]);
    }
    return out;
}

DensePrep DensePrep::fit(const features::FeatureMatrix& m) {
    DensePrep prep;
    prep.schema = m.columns;
    const std::size_t d = m.n_cols();
    const std::size_t n = m.n_rows();
    prep.impute_mean.assign(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double sum = 0.0;
        std::size_t cnt = 0;
        for (std::size_t r = 0; r < n; ++r) {
            if (m.present[c][r]) {
                sum += m.values[c][r];
                ++cnt;
            }
        }
        prep.impute_mean[c] = cnt > 0 ? sum / static_cast<double>(cnt) : 0.0;
    }

    const std::size_t dd = 2 * d;
    prep.center.assign(dd, 0.0);
    prep.scale.assign(dd, 1.0);
    if (n == 0) return prep;

    for (std::size_t c = 0; c < d; ++c) {
        double sum_v = 0.0, sum_i = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            sum_v += m.present[c][r] ? m.values[c][r] : prep.impute_mean[c];
            sum_i += m.present[c][r] ? 0.0 : 1.0;
        }
        prep.center[c] = sum_v / static_cast<double>(n);
        prep.center[d + c] = sum_i / static_cast<double>(n);
        double ss_v = 0.0, ss_i = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double v = (m.present[c][r] ? m.values[c][r] : prep.impute_mean[c]) - prep.center[c];
            const double iv = (m.present[c][r] ? 0.0 : 1.0) - prep.center[d + c];
            ss_v += v * v;
            ss_i += iv * iv;
        }
        const double std_v = std::sqrt(ss_v / static_cast<double>(n));
        const double std_i = std::sqrt(ss_i / static_cast<double>(n));
        prep.scale[c] = std_v > 0.0 ? std_v : 1.0;
        prep.scale[d + c] = std_i > 0.0 ? std_i : 1.0;
    }
    return prep;
}

std::vector<double> DensePrep::transform(const features::FeatureMatrix& m) const {
    check_schema(schema, m);
    const std::size_t d = schema.size();
    const std::size_t dd = 2 * d;
    const std::size_t n = m.n_rows();
    std::vector<double> X(n * dd, 0.0);
    std::vector<std::size_t> col(d);
    for (std::size_t c = 0; c < d; ++c) col[c] = static_cast<std::size_t>(m.column_index(schema[c]));
    for (std::size_t r = 0; r < n; ++r) {
        double* row = X.data() + r * dd;
        for (std::size_t c = 0; c < d; ++c) {
            const bool has = m.present[col[c]][r] != 0;
            const double v = has ? m.values[col[c]][r] : impute_mean[c];
            row[c] = (v - center[c]) / scale[c];
            row[d + c] = ((has ? 0.0 : 1.0) - center[d + c]) / scale[d + c];
        }
    }
    return X;
}

} // namespace litho::models
