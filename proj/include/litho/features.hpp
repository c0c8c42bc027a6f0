#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "litho/core.hpp"
#include "litho/kernels.hpp"

namespace litho::features {

// Feature families: B basic channels + APR/SED, D rolling derivatives,
// L lagged channels, F within-bin fluctuations, E lagged true classes,
// M bit-rock model coefficients, FM their fluctuations, G the greedy-
// selected subset.
enum class Family : std::uint8_t { B, D, L, F, E, M, FM, G };

std::string family_name(Family f);
std::optional<Family> family_from_name(const std::string& name);

// The greedy-selected feature subset at default windows/lags.
std::vector<std::string> default_greedy_features();

struct FeatureSpec {
    std::vector<Family> families = {Family::B};
    std::vector<double> lag_distances_m = {0.1, 0.5, 1.0, 10.0};
    double rolling_window_m = 1.0;
    std::vector<double> extra_lags_m = {20.0, 50.0};
    std::size_t math_window = 5;
    std::vector<std::string> g_features = default_greedy_features();

    bool has(Family f) const;
    void validate() const; // distances positive multiples of 0.1, math_window >= 3,
                           // extra lags >= 15 m
};

struct RowId {
    std::string well_id;
    std::string hole_id;
    std::size_t bin = 0;
    double depth = 0.0; // bin top [m]
};

// Row-per-bin feature table with explicit missing markers. Column values
// at a row depend only on data at the same or shallower depths.
struct FeatureMatrix {
    std::vector<std::string> columns; // family-tagged, unique
    std::vector<RowId> rows;
    std::vector<std::vector<double>> values;        // [column][row]
    std::vector<std::vector<std::uint8_t>> present; // [column][row]
    std::vector<std::uint8_t> target;               // class per row
    std::vector<double> row_length_m;               // 0.1 per grid bin

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return columns.size(); }
    int column_index(const std::string& name) const;

    FeatureMatrix select_columns(const std::vector<std::string>& names) const;
    FeatureMatrix filter_rows(const std::vector<std::uint8_t>& keep) const;
    std::vector<std::string> well_ids_in_order() const; // distinct, by first appearance

    void write_csv(const std::string& path) const;
};

// Eq-style derived channels; missing is the guard outcome, never a number.
std::optional<double> compute_apr(double rop, double wob, double trq);
std::optional<double> compute_sed(double wob, double rpm, double trq, double rop, double area);

// Trailing-window rolling statistics; window_m must be k*0.1 with k >= 2.
kernels::RollingStats rolling_features(const OptSeries& series, double window_m);

// One lagged copy of the series per lag distance.
std::vector<OptSeries> lag_features(const OptSeries& series, std::span<const double> lags_m);

// True classes lagged by >= 15 m (the LWD sensor offset floor; smaller lags
// would leak at-bit information and are rejected).
std::vector<OptSeries> extra_features(const LabelSeries& labels, std::span<const double> lags_m);

// Local fit of TOB = (b1 + b2*WOB)/Omega + b3 over one window of m bins.
struct BitRockFit {
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
    double residual_rms = 0.0;
    bool window_ok = false;
};

BitRockFit fit_bit_rock_model(std::span<const double> wob, std::span<const double> tob,
                              std::span<const double> omega, std::size_t m);

struct MathFeatures {
    std::array<OptSeries, 3> b;  // b1, b2, b3 per bin
    std::array<OptSeries, 3> fm; // rolling std of each b column
};

// Sliding trailing windows of math_window bins per bin; rank-deficient or
// incomplete windows come out missing.
MathFeatures math_features(const WellFrame& frame, const FeatureSpec& spec);

// Concatenates per-frame feature columns, ordered by (well_id, hole_id, bin).
// Rows without a target label are dropped.
FeatureMatrix assemble_matrix(std::span<const WellFrame> frames, const FeatureSpec& spec);

} // namespace litho::features
