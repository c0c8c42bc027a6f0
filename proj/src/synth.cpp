#include "litho/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>

#include "litho/csv.hpp"
#include "litho/parallel.hpp"
#include "litho/seeds.hpp"

namespace fs = std::filesystem;

namespace litho::synth {

namespace {

double reflect_into(double v, double lo, double hi) {
    if (!(hi > lo)) return lo;
    while (v < lo || v > hi) {
        if (v < lo) v = lo + (lo - v);
        if (v > hi) v = hi - (v - hi);
    }
    return v;
}

// Bounded random walk, one value per bin.
std::vector<double> bounded_walk(std::size_t n, double lo, double hi, double step,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> out(n);
    double v = hi > lo ? u(rng) : lo;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = v;
        v = reflect_into(v + (step > 0.0 ? step * g(rng) : 0.0), lo, hi);
    }
    return out;
}

std::vector<double> ar1_path(std::size_t n, const NuisanceParams& p,
                             std::span<const std::uint8_t> litho, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> out(n);
    const double mean0 = p.mean + (litho.empty() || !litho[0] ? 0.0 : p.class1_shift);
    double v = mean0 + (p.innov_std > 0.0 ? p.innov_std * g(rng) : 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double m = p.mean + (litho[i] ? p.class1_shift : 0.0);
        out[i] = v;
        v = m + p.rho * (v - m) + (p.innov_std > 0.0 ? p.innov_std * g(rng) : 0.0);
    }
    return out;
}

// Missing-run mask per channel: true = bin observed.
std::vector<std::uint8_t> observation_mask(std::size_t n, double rate, double mean_run,
                                           std::uint64_t seed) {
    std::vector<std::uint8_t> mask(n, 1);
    if (rate <= 0.0) return mask;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double p_end = 1.0 / std::max(1.0, mean_run);
    std::size_t i = 0;
    while (i < n) {
        if (u(rng) < rate) {
            do {
                mask[i++] = 0;
            } while (i < n && u(rng) >= p_end);
        } else {
            ++i;
        }
    }
    return mask;
}

} // namespace

void SynthWellSpec::validate() const {
    if (n_bins < 1) throw ConfigError("synth: n_bins must be >= 1");
    if (min_run < 1) throw ConfigError("synth: min_run must be >= 1");
    if (p_sand_to_rock < 0.0 || p_sand_to_rock > 1.0 || p_rock_to_sand < 0.0 ||
        p_rock_to_sand > 1.0)
        throw ConfigError("synth: switch probabilities must be in [0, 1]");
    if (!(omega_min > 1e-6) || omega_max < omega_min)
        throw ConfigError("synth: omega bounds must be positive and ordered");
    if (wob_max < wob_min) throw ConfigError("synth: wob bounds must be ordered");
    for (double f : noise_frac) {
        if (f < 0.0) throw ConfigError("synth: noise fractions must be >= 0");
    }
    if (samples_per_bin < 1 || samples_per_bin > 50)
        throw ConfigError("synth: samples_per_bin must be in [1, 50]");
    if (!(bit_area > 0.0)) throw ConfigError("synth: bit_area must be > 0");
    for (const RockParams& r : rock) {
        if (!(r.a2 > 0.0) || !(r.a4 > 0.0))
            throw ConfigError("synth: rock params need a2 > 0 and a4 > 0");
    }
}

std::vector<std::uint8_t> gen_lithology(const SynthWellSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(derive_seed(spec.seed, "litho", 0));
    std::uniform_real_distribution<double> u(0.0, 1.0);

    // Expected run lengths give the stationary share used for the initial state.
    auto mean_run = [&](double p) {
        return static_cast<double>(spec.min_run) + (p > 0.0 ? (1.0 - p) / p : 1e9);
    };
    const double e0 = mean_run(spec.p_sand_to_rock);
    const double e1 = mean_run(spec.p_rock_to_sand);
    const double share1 = e1 / (e0 + e1);

    std::vector<std::uint8_t> cls(spec.n_bins);
    std::uint8_t state = u(rng) < share1 ? 1 : 0;
    std::size_t run = 0;
    for (std::size_t i = 0; i < spec.n_bins; ++i) {
        cls[i] = state;
        ++run;
        if (run >= spec.min_run) {
            const double p_switch = state ? spec.p_rock_to_sand : spec.p_sand_to_rock;
            if (u(rng) < p_switch) {
                state = state ? 0 : 1;
                run = 0;
            }
        }
    }
    return cls;
}

SynthLateral gen_telemetry(std::span<const std::uint8_t> litho, const SynthWellSpec& spec) {
    spec.validate();
    if (litho.size() != spec.n_bins) throw DataError("gen_telemetry: litho length mismatch");
    const std::size_t n = spec.n_bins;

    const std::vector<double> wob =
        bounded_walk(n, spec.wob_min, spec.wob_max, spec.wob_step, derive_seed(spec.seed, "wob", 0));

    // The rotation path must stay away from zero; reflecting bounds with
    // omega_min > 0 guarantee it, the loop guards pathological configs.
    std::vector<double> omega;
    for (std::size_t attempt = 0;; ++attempt) {
        omega = bounded_walk(n, spec.omega_min, spec.omega_max, spec.omega_step,
                             derive_seed(spec.seed, "omega", attempt));
        const bool ok = std::all_of(omega.begin(), omega.end(), [](double v) { return v > 1e-9; });
        if (ok) break;
        if (attempt > 100) throw DataError("gen_telemetry: could not keep omega away from zero");
    }

    // True per-bin channel values.
    std::array<std::vector<double>, kNumChannels> truth;
    for (auto& t : truth) t.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const RockParams& r = spec.rock[litho[i]];
        const double rop = r.a1 + r.a2 * wob[i] + r.a3 * omega[i];
        const double tob = r.a4 * rop / omega[i] + r.a5;
        truth[static_cast<std::size_t>(ChannelId::WOB)][i] = wob[i];
        truth[static_cast<std::size_t>(ChannelId::TRQ)][i] = tob;
        truth[static_cast<std::size_t>(ChannelId::ROP)][i] = rop;
        truth[static_cast<std::size_t>(ChannelId::RPM)][i] = omega[i];
    }
    truth[static_cast<std::size_t>(ChannelId::QIN)] =
        ar1_path(n, spec.qin, litho, derive_seed(spec.seed, "qin", 0));
    truth[static_cast<std::size_t>(ChannelId::QOUT)] =
        ar1_path(n, spec.qout, litho, derive_seed(spec.seed, "qout", 0));
    truth[static_cast<std::size_t>(ChannelId::SPP)] =
        ar1_path(n, spec.spp, litho, derive_seed(spec.seed, "spp", 0));
    truth[static_cast<std::size_t>(ChannelId::HL)] =
        ar1_path(n, spec.hl, litho, derive_seed(spec.seed, "hl", 0));

    std::array<std::vector<std::uint8_t>, kNumChannels> observed;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        observed[c] = observation_mask(n, spec.missing_rate, spec.missing_mean_run,
                                       derive_seed(spec.seed, "miss", c));
    }

    SynthLateral out;
    WellFrame& frame = out.frame;
    frame.well_id = spec.well_id;
    frame.hole_id = spec.hole_id;
    frame.grid.start_depth = spec.start_depth;
    frame.grid.n_bins = n;
    frame.bit_area = spec.bit_area;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        frame.channels[c].resize(n);
        frame.within_bin_std[c].resize(n);
    }
    frame.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) frame.labels.set(i, litho[i]);

    const int k = spec.samples_per_bin;
    std::mt19937_64 noise_rng(derive_seed(spec.seed, "noise", 0));
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> samples(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < kNumChannels; ++c) {
            // Noise draws are consumed in a fixed order even for unobserved
            // bins so the missing pattern does not shift other channels.
            for (int s = 0; s < k; ++s) {
                const double xi = spec.noise_frac[c] > 0.0 ? gauss(noise_rng) : 0.0;
                samples[static_cast<std::size_t>(s)] =
                    truth[c][i] * (1.0 + spec.noise_frac[c] * xi);
            }
            if (!observed[c][i]) continue;

            double sum = 0.0;
            for (int s = 0; s < k; ++s) sum += samples[static_cast<std::size_t>(s)];
            const double mean = sum / static_cast<double>(k);
            double ssd = 0.0;
            for (int s = 0; s < k; ++s) {
                const double d = samples[static_cast<std::size_t>(s)] - mean;
                ssd += d * d;
            }
            frame.channels[c].set(i, mean);
            frame.within_bin_std[c].set(i, std::sqrt(ssd / static_cast<double>(k)));

            const double depth_step = frame.grid.bin_size / static_cast<double>(k);
            for (int s = 0; s < k; ++s) {
                ingest::RawRecord rec;
                rec.well_id = spec.well_id;
                rec.hole_id = spec.hole_id;
                rec.depth = frame.grid.bin_top(i) + (static_cast<double>(s) + 0.5) * depth_step;
                rec.channel = static_cast<ChannelId>(c);
                rec.value = samples[static_cast<std::size_t>(s)];
                out.records.push_back(std::move(rec));
            }
        }
    }

    out.bounds.well_id = spec.well_id;
    out.bounds.start = spec.start_depth;
    out.bounds.end = spec.start_depth + static_cast<double>(n) * frame.grid.bin_size - 0.001;
    out.bounds.bit_area = spec.bit_area;
    return out;
}

std::vector<SynthLateral> gen_benchmark(std::size_t n_wells, const SynthWellSpec& tmpl,
                                        std::uint64_t seed, const BenchmarkOptions& opts) {
    if (n_wells < 2) throw ConfigError("gen_benchmark: need at least 2 wells");
    tmpl.validate();

    auto well_spec = [&](std::size_t w, double p_sand_to_rock) {
        SynthWellSpec s = tmpl;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "W%02zu", w + 1);
        s.well_id = buf;
        s.hole_id = "H1";
        s.seed = derive_seed(seed, "well", w);
        s.p_sand_to_rock = p_sand_to_rock;
        s.start_depth = tmpl.start_depth + 40.0 * static_cast<double>(w);
        if (opts.param_jitter > 0.0) {
            std::mt19937_64 rng(derive_seed(seed, "jitter", w));
            std::uniform_real_distribution<double> u(-opts.param_jitter, opts.param_jitter);
            for (RockParams& r : s.rock) {
                r.a1 *= 1.0 + u(rng);
                r.a2 *= 1.0 + u(rng);
                r.a3 *= 1.0 + u(rng);
                r.a4 *= 1.0 + u(rng);
                r.a5 *= 1.0 + u(rng);
            }
        }
        return s;
    };

    double p_rock = tmpl.p_sand_to_rock;
    double achieved = 0.0;
    for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
        std::vector<SynthWellSpec> specs;
        std::vector<std::vector<std::uint8_t>> lithos(n_wells);
        for (std::size_t w = 0; w < n_wells; ++w) specs.push_back(well_spec(w, p_rock));
        std::size_t ones = 0, total = 0;
        for (std::size_t w = 0; w < n_wells; ++w) {
            lithos[w] = gen_lithology(specs[w]);
            for (std::uint8_t c : lithos[w]) ones += c;
            total += lithos[w].size();
        }
        achieved = static_cast<double>(ones) / static_cast<double>(total);
        if (achieved >= opts.share_min && achieved <= opts.share_max) {
            std::vector<SynthLateral> out(n_wells);
            parallel::parallel_for(n_wells,
                                   [&](std::size_t w) { out[w] = gen_telemetry(lithos[w], specs[w]); });
            return out;
        }
        const double factor = std::clamp(opts.target_share / std::max(achieved, 1e-4), 0.5, 2.0);
        p_rock = std::clamp(p_rock * factor, 1e-5, 0.5);
    }
    throw DataError("gen_benchmark: share calibration failed, achieved " +
                    std::to_string(achieved));
}

BenchmarkFiles write_benchmark_csv(const std::string& dir,
                                   std::span<const SynthLateral> laterals) {
    fs::create_directories(dir);
    BenchmarkFiles files;

    struct ColumnUnit {
        ChannelId id;
        double from_si;
    };
    const ColumnUnit columns[] = {
        {ChannelId::WOB, 1e-3},          {ChannelId::TRQ, 1e-3},
        {ChannelId::ROP, 3600.0},        {ChannelId::RPM, 60.0},
        {ChannelId::QIN, 60.0 * 1e3},    {ChannelId::QOUT, 60.0 * 1e3},
        {ChannelId::SPP, 1e-5},          {ChannelId::HL, 1e-3},
    };

    for (const SynthLateral& lat : laterals) {
        const std::string path = dir + "/" + lat.frame.well_id + "_" + lat.frame.hole_id + ".csv";
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw DataError("cannot write " + path);
        out << "well_id,hole_id,depth_m,wob_kn,trq_knm,rop_mh,rpm,q_in_lmin,q_out_lmin,spp_bar,hl_kn\n";

        // Records arrive ordered by (bin, channel, sample); regroup into one
        // CSV row per sample depth.
        std::map<double, std::array<std::optional<double>, kNumChannels>> rows;
        for (const ingest::RawRecord& rec : lat.records) {
            rows[rec.depth][static_cast<std::size_t>(rec.channel)] = rec.value;
        }
        for (const auto& [depth, cells] : rows) {
            out << lat.frame.well_id << ',' << lat.frame.hole_id << ','
                << csv::format_double(depth);
            for (const ColumnUnit& cu : columns) {
                out << ',';
                const auto& cell = cells[static_cast<std::size_t>(cu.id)];
                if (cell) out << csv::format_double(*cell * cu.from_si);
            }
            out << '\n';
        }
        files.mwd_files.push_back(path);
    }

    files.litho_csv = dir + "/litho.csv";
    {
        std::ofstream out(files.litho_csv, std::ios::trunc);
        if (!out) throw DataError("cannot write " + files.litho_csv);
        out << "well_id,top_m,bottom_m,litho_class\n";
        for (const SynthLateral& lat : laterals) {
            const LabelSeries& labels = lat.frame.labels;
            const DepthGrid& grid = lat.frame.grid;
            std::size_t i = 0;
            while (i < labels.size()) {
                if (!labels.has(i)) {
                    ++i;
                    continue;
                }
                const std::uint8_t cls = labels.cls[i];
                std::size_t j = i;
                while (j < labels.size() && labels.has(j) && labels.cls[j] == cls) ++j;
                out << lat.frame.well_id << ',' << csv::format_double(grid.bin_top(i)) << ','
                    << csv::format_double(grid.bin_top(j)) << ',' << int(cls) << '\n';
                i = j;
            }
        }
    }

    files.bounds_csv = dir + "/bounds.csv";
    {
        std::ofstream out(files.bounds_csv, std::ios::trunc);
        if (!out) throw DataError("cannot write " + files.bounds_csv);
        out << "well_id,horiz_start_m,horiz_end_m,bit_area_m2\n";
        for (const SynthLateral& lat : laterals) {
            out << lat.bounds.well_id << ',' << csv::format_double(lat.bounds.start) << ','
                << csv::format_double(lat.bounds.end) << ','
                << csv::format_double(lat.bounds.bit_area) << '\n';
        }
    }
    return files;
}

WellFrame fill_frame(const WellFrame& frame) {
    WellFrame out = frame;
    for (OptSeries& s : out.channels) s = ingest::forward_fill(s).filled;
    return out;
}

} // namespace litho::synth
