#include "litho/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "litho/csv.hpp"
#include "litho/parallel.hpp"

namespace litho::features {

namespace {

constexpr double kEps = 1e-9;         // SI guard for divisions
constexpr double kCondLimit = 1e12;   // rank-deficiency threshold for Eq. fits

std::string fmt_meters(double m) {
    std::ostringstream os;
    os << m;
    return os.str();
}

bool is_bin_multiple(double meters) {
    const double k = meters / DepthGrid::kBinSize;
    return meters > 0.0 && std::abs(k - std::round(k)) < 1e-6;
}

std::size_t bins_of(double meters) {
    return static_cast<std::size_t>(std::llround(meters / DepthGrid::kBinSize));
}

std::string lower_channel(ChannelId id) {
    std::string s(channel_name(id));
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::B: return "B";
        case Family::D: return "D";
        case Family::L: return "L";
        case Family::F: return "F";
        case Family::E: return "E";
        case Family::M: return "M";
        case Family::FM: return "FM";
        case Family::G: return "G";
    }
    return "?";
}

std::optional<Family> family_from_name(const std::string& name) {
    for (Family f : {Family::B, Family::D, Family::L, Family::F, Family::E, Family::M, Family::FM,
                     Family::G}) {
        if (family_name(f) == name) return f;
    }
    return std::nullopt;
}

std::vector<std::string> default_greedy_features() {
    return {
        "B_rop",          "B_hl",           "D_wob_diff1m",  "D_rop_std1m",
        "D_trq_std1m",    "D_rop_mean1m",   "L_trq_lag0.5m", "L_qout_lag10m",
        "L_qin_lag10m",   "L_hl_lag10m",    "L_trq_lag10m",
    };
}

bool FeatureSpec::has(Family f) const {
    return std::find(families.begin(), families.end(), f) != families.end();
}

void FeatureSpec::validate() const {
    for (double d : lag_distances_m) {
        if (!is_bin_multiple(d)) throw ConfigError("lag distance must be a positive multiple of 0.1 m");
    }
    if (!is_bin_multiple(rolling_window_m) || bins_of(rolling_window_m) < 2)
        throw ConfigError("rolling window must be k*0.1 m with k >= 2");
    for (double d : extra_lags_m) {
        if (!is_bin_multiple(d)) throw ConfigError("extra lag must be a positive multiple of 0.1 m");
        if (d < 15.0)
            throw ConfigError("extra lag below the 15 m sensor offset would leak at-bit labels");
    }
    if (math_window < 3) throw ConfigError("math window must be >= 3 (three model parameters)");
}

int FeatureMatrix::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return static_cast<int>(i);
    }
    return -1;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::string>& names) const {
    FeatureMatrix out;
    out.rows = rows;
    out.target = target;
    out.row_length_m = row_length_m;
    for (const std::string& name : names) {
        const int idx = column_index(name);
        if (idx < 0) throw DataError("unknown feature column: " + name);
        out.columns.push_back(name);
        out.values.push_back(values[static_cast<std::size_t>(idx)]);
        out.present.push_back(present[static_cast<std::size_t>(idx)]);
    }
    return out;
}

FeatureMatrix FeatureMatrix::filter_rows(const std::vector<std::uint8_t>& keep) const {
    if (keep.size() != n_rows()) throw DataError("filter_rows: mask length mismatch");
    FeatureMatrix out;
    out.columns = columns;
    out.values.resize(columns.size());
    out.present.resize(columns.size());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        if (!keep[r]) continue;
        out.rows.push_back(rows[r]);
        out.target.push_back(target[r]);
        out.row_length_m.push_back(row_length_m[r]);
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out.values[c].reserve(out.rows.size());
        out.present[c].reserve(out.rows.size());
        for (std::size_t r = 0; r < keep.size(); ++r) {
            if (!keep[r]) continue;
            out.values[c].push_back(values[c][r]);
            out.present[c].push_back(present[c][r]);
        }
    }
    return out;
}

std::vector<std::string> FeatureMatrix::well_ids_in_order() const {
    std::vector<std::string> out;
    for (const RowId& r : rows) {
        if (out.empty() || out.back() != r.well_id) {
            if (std::find(out.begin(), out.end(), r.well_id) == out.end())
                out.push_back(r.well_id);
        }
    }
    return out;
}

void FeatureMatrix::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out << "well_id,hole_id,depth_m,target";
    for (const std::string& c : columns) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < n_rows(); ++r) {
        out << rows[r].well_id << ',' << rows[r].hole_id << ',' << csv::format_double(rows[r].depth)
            << ',' << int(target[r]);
        for (std::size_t c = 0; c < n_cols(); ++c) {
            out << ',';
            if (present[c][r]) out << csv::format_double(values[c][r]);
        }
        out << '\n';
    }
}

std::optional<double> compute_apr(double rop, double wob, double trq) {
    if (wob <= kEps || trq <= kEps) return std::nullopt;
    return rop / (wob * std::sqrt(trq));
}

std::optional<double> compute_sed(double wob, double rpm, double trq, double rop, double area) {
    if (!(area > 0.0)) throw DataError("compute_sed: area must be > 0");
    if (rop <= kEps) return std::nullopt;
    return wob / area + (2.0 * std::numbers::pi * rpm * trq) / (area * rop);
}

kernels::RollingStats rolling_features(const OptSeries& series, double window_m) {
    if (!is_bin_multiple(window_m) || bins_of(window_m) < 2)
        throw ConfigError("rolling window must be k*0.1 m with k >= 2");
    return kernels::rolling_stats(series, bins_of(window_m));
}

std::vector<OptSeries> lag_features(const OptSeries& series, std::span<const double> lags_m) {
    std::vector<OptSeries> out;
    out.reserve(lags_m.size());
    for (double lag : lags_m) {
        if (!is_bin_multiple(lag)) throw ConfigError("lag must be a positive multiple of 0.1 m");
        const std::size_t shift = bins_of(lag);
        OptSeries lagged(series.size());
        for (std::size_t i = shift; i < series.size(); ++i) {
            if (series.has(i - shift)) lagged.set(i, series.value[i - shift]);
        }
        out.push_back(std::move(lagged));
    }
    return out;
}

std::vector<OptSeries> extra_features(const LabelSeries& labels, std::span<const double> lags_m) {
    std::vector<OptSeries> out;
    out.reserve(lags_m.size());
    for (double lag : lags_m) {
        if (lag < 15.0)
            throw ConfigError("extra-feature lag " + fmt_meters(lag) +
                              " m is below the 15 m sensor offset floor (label leakage)");
        if (!is_bin_multiple(lag)) throw ConfigError("lag must be a positive multiple of 0.1 m");
        const std::size_t shift = bins_of(lag);
        OptSeries lagged(labels.size());
        for (std::size_t i = shift; i < labels.size(); ++i) {
            if (labels.has(i - shift)) lagged.set(i, static_cast<double>(labels.cls[i - shift]));
        }
        out.push_back(std::move(lagged));
    }
    return out;
}

BitRockFit fit_bit_rock_model(std::span<const double> wob, std::span<const double> tob,
                              std::span<const double> omega, std::size_t m) {
    if (m < 3) throw DataError("fit_bit_rock_model: window must have m >= 3 bins");
    if (wob.size() != m || tob.size() != m || omega.size() != m)
        throw DataError("fit_bit_rock_model: window length mismatch");
    BitRockFit fit;
    std::vector<double> inv_omega(m), wob_over_omega(m), ones(m, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (omega[i] <= kEps) return fit; // stalled rotation: no usable window
        inv_omega[i] = 1.0 / omega[i];
        wob_over_omega[i] = wob[i] / omega[i];
    }
    const kernels::Ls3Fit ls = kernels::ls3_solve(inv_omega, wob_over_omega, ones, tob, kCondLimit);
    if (!ls.ok) return fit;
    fit.b1 = ls.coef[0];
    fit.b2 = ls.coef[1];
    fit.b3 = ls.coef[2];
    fit.residual_rms = ls.residual_rms;
    fit.window_ok = true;
    return fit;
}

MathFeatures math_features(const WellFrame& frame, const FeatureSpec& spec) {
    const std::size_t n = frame.grid.n_bins;
    const OptSeries& wob = frame.channel(ChannelId::WOB);
    const OptSeries& trq = frame.channel(ChannelId::TRQ);
    const OptSeries& rpm = frame.channel(ChannelId::RPM);

    OptSeries inv_omega(n), wob_over_omega(n), ones(n), tob(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!wob.has(i) || !trq.has(i) || !rpm.has(i)) continue;
        if (rpm.value[i] <= kEps) continue;
        inv_omega.set(i, 1.0 / rpm.value[i]);
        wob_over_omega.set(i, wob.value[i] / rpm.value[i]);
        ones.set(i, 1.0);
        tob.set(i, trq.value[i]);
    }

    const kernels::Ls3Series fits =
        kernels::ls3_fit_windows(inv_omega, wob_over_omega, ones, tob, spec.math_window, kCondLimit);

    MathFeatures out;
    out.b = fits.coef;
    const std::size_t k = bins_of(spec.rolling_window_m);
    for (std::size_t p = 0; p < 3; ++p) {
        out.fm[p] = kernels::rolling_stats(out.b[p], k).stddev;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Matrix assembly
// ---------------------------------------------------------------------------

namespace {

struct FrameColumns {
    std::vector<std::string> names;
    std::vector<OptSeries> series;
    std::set<std::string> seen;

    void add(const std::string& name, OptSeries s) {
        if (!seen.insert(name).second) return; // G may re-request B/D/L members
        names.push_back(name);
        series.push_back(std::move(s));
    }
};

// Base channels plus APR and SED, as named series.
std::vector<std::pair<std::string, OptSeries>> base_series(const WellFrame& frame) {
    std::vector<std::pair<std::string, OptSeries>> out;
    for (ChannelId id : kAllChannels) out.emplace_back(lower_channel(id), frame.channel(id));

    const std::size_t n = frame.grid.n_bins;
    const OptSeries& rop = frame.channel(ChannelId::ROP);
    const OptSeries& wob = frame.channel(ChannelId::WOB);
    const OptSeries& trq = frame.channel(ChannelId::TRQ);
    const OptSeries& rpm = frame.channel(ChannelId::RPM);

    OptSeries apr(n), sed(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rop.has(i) && wob.has(i) && trq.has(i)) {
            if (auto v = compute_apr(rop.value[i], wob.value[i], trq.value[i])) apr.set(i, *v);
        }
        if (wob.has(i) && rpm.has(i) && trq.has(i) && rop.has(i)) {
            if (auto v = compute_sed(wob.value[i], rpm.value[i], trq.value[i], rop.value[i],
                                     frame.bit_area))
                sed.set(i, *v);
        }
    }
    out.emplace_back("apr", std::move(apr));
    out.emplace_back("sed", std::move(sed));
    return out;
}

FrameColumns build_frame_columns(const WellFrame& frame, const FeatureSpec& spec) {
    FrameColumns cols;
    const auto base = base_series(frame);
    const bool need_d = spec.has(Family::D) || spec.has(Family::G);
    const bool need_l = spec.has(Family::L) || spec.has(Family::G);
    const std::string wtag = fmt_meters(spec.rolling_window_m);

    std::map<std::string, kernels::RollingStats> rolled;
    if (need_d) {
        for (const auto& [name, s] : base)
            rolled[name] = rolling_features(s, spec.rolling_window_m);
    }
    std::map<std::string, std::vector<OptSeries>> lagged;
    if (need_l) {
        for (const auto& [name, s] : base)
            lagged[name] = lag_features(s, spec.lag_distances_m);
    }

    for (Family f : spec.families) {
        switch (f) {
            case Family::B:
                for (const auto& [name, s] : base) cols.add("B_" + name, s);
                break;
            case Family::D:
                for (const auto& [name, s] : base) {
                    const auto& rs = rolled.at(name);
                    cols.add("D_" + name + "_mean" + wtag + "m", rs.mean);
                    cols.add("D_" + name + "_std" + wtag + "m", rs.stddev);
                    cols.add("D_" + name + "_diff" + wtag + "m", rs.border_diff);
                }
                break;
            case Family::L:
                for (const auto& [name, s] : base) {
                    const auto& ls = lagged.at(name);
                    for (std::size_t j = 0; j < spec.lag_distances_m.size(); ++j)
                        cols.add("L_" + name + "_lag" + fmt_meters(spec.lag_distances_m[j]) + "m",
                                 ls[j]);
                }
                break;
            case Family::F:
                for (ChannelId id : kAllChannels)
                    cols.add("F_" + lower_channel(id), frame.fluctuation(id));
                break;
            case Family::E: {
                const auto extra = extra_features(frame.labels, spec.extra_lags_m);
                for (std::size_t j = 0; j < spec.extra_lags_m.size(); ++j)
                    cols.add("E_label_lag" + fmt_meters(spec.extra_lags_m[j]) + "m", extra[j]);
                break;
            }
            case Family::M:
            case Family::FM: {
                const MathFeatures mf = math_features(frame, spec);
                if (f == Family::M) {
                    for (int p = 0; p < 3; ++p)
                        cols.add("M_b" + std::to_string(p + 1), mf.b[static_cast<std::size_t>(p)]);
                } else {
                    for (int p = 0; p < 3; ++p)
                        cols.add("FM_b" + std::to_string(p + 1) + "_std" + wtag + "m",
                                 mf.fm[static_cast<std::size_t>(p)]);
                }
                break;
            }
            case Family::G: {
                std::map<std::string, const OptSeries*> pool;
                for (const auto& [name, s] : base) pool["B_" + name] = &s;
                for (const auto& [name, rs] : rolled) {
                    pool["D_" + name + "_mean" + wtag + "m"] = &rs.mean;
                    pool["D_" + name + "_std" + wtag + "m"] = &rs.stddev;
                    pool["D_" + name + "_diff" + wtag + "m"] = &rs.border_diff;
                }
                for (const auto& [name, ls] : lagged) {
                    for (std::size_t j = 0; j < spec.lag_distances_m.size(); ++j)
                        pool["L_" + name + "_lag" + fmt_meters(spec.lag_distances_m[j]) + "m"] =
                            &ls[j];
                }
                for (const std::string& want : spec.g_features) {
                    auto it = pool.find(want);
                    if (it == pool.end())
                        throw ConfigError("greedy feature '" + want +
                                          "' is not derivable from the configured windows/lags");
                    cols.add(want, *it->second);
                }
                break;
            }
        }
    }
    return cols;
}

} // namespace

FeatureMatrix assemble_matrix(std::span<const WellFrame> frames, const FeatureSpec& spec) {
    spec.validate();

    std::vector<const WellFrame*> ordered;
    for (const WellFrame& f : frames) ordered.push_back(&f);
    std::sort(ordered.begin(), ordered.end(), [](const WellFrame* a, const WellFrame* b) {
        return std::tie(a->well_id, a->hole_id) < std::tie(b->well_id, b->hole_id);
    });

    std::vector<FrameColumns> per_frame(ordered.size());
    parallel::parallel_for(ordered.size(), [&](std::size_t i) {
        per_frame[i] = build_frame_columns(*ordered[i], spec);
    });

    FeatureMatrix out;
    if (ordered.empty()) return out;

    out.columns = per_frame[0].names;
    out.values.resize(out.columns.size());
    out.present.resize(out.columns.size());

    for (std::size_t fi = 0; fi < ordered.size(); ++fi) {
        const WellFrame& frame = *ordered[fi];
        const FrameColumns& cols = per_frame[fi];
        if (cols.names != out.columns)
            throw DataError("assemble_matrix: inconsistent columns across frames");
        for (std::size_t bin = 0; bin < frame.grid.n_bins; ++bin) {
            if (!frame.labels.has(bin)) continue; // no target -> row dropped
            out.rows.push_back(RowId{frame.well_id, frame.hole_id, bin, frame.grid.bin_top(bin)});
            out.target.push_back(frame.labels.cls[bin]);
            out.row_length_m.push_back(DepthGrid::kBinSize);
            for (std::size_t c = 0; c < cols.series.size(); ++c) {
                const OptSeries& s = cols.series[c];
                out.values[c].push_back(s.has(bin) ? s.value[bin] : 0.0);
                out.present[c].push_back(s.present[bin]);
            }
        }
    }
    return out;
}

} // namespace litho::features
