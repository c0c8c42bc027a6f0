#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "litho/core.hpp"
#include "litho/ingest.hpp"

namespace litho::synth {

// Bit-rock interaction coefficients of one rock class:
//   ROP = a1 + a2*WOB + a3*Omega
//   TOB = a4*ROP/Omega + a5
struct RockParams {
    double a1 = 0.0; // base rate [m/s]
    double a2 = 0.0; // crushing response [m/s per N]
    double a3 = 0.0; // cutting response [m/rev]
    double a4 = 0.0; // cutting torque scale [N*m*s/m*rev/s composite]
    double a5 = 0.0; // friction torque [N*m]
};

// Autocorrelated nuisance channel with an optional class-1 mean shift.
struct NuisanceParams {
    double mean = 0.0;
    double class1_shift = 0.0;
    double rho = 0.95;      // AR(1) coefficient
    double innov_std = 0.0; // innovation std, absolute units
};

struct SynthWellSpec {
    std::string well_id = "W01";
    std::string hole_id = "H1";
    std::size_t n_bins = 1000;
    double start_depth = 2500.0;

    // Two-state lithotype chain: per-bin switch probabilities with a
    // minimum run length in bins.
    double p_sand_to_rock = 0.0053;
    double p_rock_to_sand = 0.075;
    std::size_t min_run = 20;

    std::array<RockParams, 2> rock = {
        RockParams{2.0e-3, 6.0e-8, 5.0e-4, 8.0e5, 2.0e3},  // sand
        RockParams{1.0e-3, 3.5e-8, 3.0e-4, 1.4e6, 3.0e3},  // shale/hard-rock
    };

    // Control inputs as bounded (reflecting) random walks, one step per bin.
    double wob_min = 3.0e4, wob_max = 9.0e4, wob_step = 1.5e3; // [N]
    double omega_min = 1.2, omega_max = 3.0, omega_step = 0.04; // [rev/s]

    // Multiplicative measurement noise per channel (fraction of the value).
    std::array<double, kNumChannels> noise_frac = {
        0.03, 0.03, 0.03, 0.01, 0.01, 0.01, 0.02, 0.015,
    };

    NuisanceParams qin{0.030, -0.0003, 0.97, 3.0e-4};
    NuisanceParams qout{0.0295, -0.0005, 0.97, 3.0e-4};
    NuisanceParams spp{1.2e7, 1.5e5, 0.96, 1.0e5};
    NuisanceParams hl{9.0e5, 1.2e4, 0.95, 7.0e3};

    // Probability per bin and channel of starting a missing run.
    double missing_rate = 0.0;
    double missing_mean_run = 8.0; // bins

    int samples_per_bin = 4;
    double bit_area = 0.045; // [m^2]
    std::uint64_t seed = 1;

    void validate() const;
};

// Markov lithotype sequence respecting the minimum run length (the last run
// may be truncated by the end of the well).
std::vector<std::uint8_t> gen_lithology(const SynthWellSpec& spec);

struct SynthLateral {
    WellFrame frame;                        // binned, before forward fill
    std::vector<ingest::RawRecord> records; // sub-bin samples, SI units
    ingest::WellBounds bounds;
};

// Telemetry from the bit-rock model with per-bin rock parameters; control
// paths at bin resolution, measurement noise at sub-bin resolution.
SynthLateral gen_telemetry(std::span<const std::uint8_t> litho, const SynthWellSpec& spec);

struct BenchmarkOptions {
    double param_jitter = 0.15;  // relative rock-parameter spread across wells
    double target_share = 0.135; // pooled class-1 length share
    double share_min = 0.10;
    double share_max = 0.17;
    std::size_t max_attempts = 16;
};

// Multi-well benchmark with per-well perturbed rock parameters, calibrated
// so the pooled class-1 share lands in [share_min, share_max].
std::vector<SynthLateral> gen_benchmark(std::size_t n_wells, const SynthWellSpec& tmpl,
                                        std::uint64_t seed, const BenchmarkOptions& opts = {});

// Emits the exact ingest schemas: one MWD CSV per lateral under <dir>/,
// plus litho.csv and bounds.csv.
struct BenchmarkFiles {
    std::vector<std::string> mwd_files;
    std::string litho_csv;
    std::string bounds_csv;
};
BenchmarkFiles write_benchmark_csv(const std::string& dir,
                                   std::span<const SynthLateral> laterals);

// Forward-fills every channel of a generated frame (the preprocessing the
// real pipeline applies between binning and featurization).
WellFrame fill_frame(const WellFrame& frame);

} // namespace litho::synth
