#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "litho/core.hpp"

namespace litho::ingest {

// One telemetry sample from a raw MWD file, already converted to SI.
struct RawRecord {
    std::string well_id;
    std::string hole_id;
    double depth = 0.0; // measured depth [m]
    ChannelId channel = ChannelId::WOB;
    double value = 0.0;
};

// One row of the lithology map.
struct LithoInterval {
    std::string well_id;
    double top = 0.0;
    double bottom = 0.0;
    std::uint8_t cls = 0;
};

// Per-well horizontal-section bounds and bit geometry.
struct WellBounds {
    std::string well_id;
    double start = 0.0;
    double end = 0.0;
    double bit_area = 0.0;
};

struct ParseOptions {
    // A file errors out when bad rows exceed max(1, share * rows).
    double max_bad_row_share = 0.01;
};

struct ParseReport {
    std::size_t n_rows = 0;
    std::size_t n_records = 0;
    std::size_t n_bad = 0;
    std::size_t first_bad_line = 0; // 1-based, 0 = none
};

// Reads one wide-format MWD CSV (schema: well_id,hole_id,depth_m,wob_kn,
// trq_knm,rop_mh,rpm,q_in_lmin,q_out_lmin,spp_bar,hl_kn). Empty cells are
// missing; malformed rows are skipped and counted.
std::vector<RawRecord> parse_mwd(const std::string& path, ParseReport* report = nullptr,
                                 const ParseOptions& opts = {});

std::vector<LithoInterval> parse_litho_csv(const std::string& path);
std::vector<WellBounds> parse_bounds_csv(const std::string& path);

// Keeps records with depth inside the well's [start, end] (inclusive).
std::vector<RawRecord> clip_horizontal(std::span<const RawRecord> records,
                                       const std::map<std::string, WellBounds>& bounds);

struct BinnedChannel {
    OptSeries mean;
    OptSeries stddev; // population std of raw values inside the bin
    std::vector<std::uint32_t> count;
};

// Aggregates one channel's records onto the grid. Empty bins come out
// missing; a single-sample bin has std 0.
BinnedChannel bin_to_grid(std::span<const RawRecord> records, ChannelId channel,
                          const DepthGrid& grid);

struct FillResult {
    OptSeries filled;
    std::size_t leading_gap_bins = 0;
};

// Each missing bin takes the latest preceding observed value. Bins before
// the first observation stay missing (leading gap); back-filling them would
// use future data.
FillResult forward_fill(const OptSeries& series);

// Rasterizes intervals onto the grid by majority covered length; ties go to
// the deeper interval. Bins with zero interval coverage stay unlabeled.
// Overlapping intervals of different class are an error.
LabelSeries labels_to_grid(std::span<const LithoInterval> intervals, const DepthGrid& grid);

// ---------------------------------------------------------------------------
// Staged pipeline with content-addressed caching
// ---------------------------------------------------------------------------

struct StageRecord {
    std::vector<std::string> input_digests;
    std::string params_digest;
    std::string output_digest;
    std::string timestamp;
};

struct PipelineManifest {
    std::map<std::string, StageRecord> stages;
};

struct PipelineConfig {
    std::vector<std::string> mwd_files;
    std::string litho_csv;
    std::string bounds_csv;
    std::string cache_dir;
    ParseOptions parse;
};

struct PipelineStats {
    std::size_t stages_run = 0;
    std::size_t stages_cached = 0;
};

struct PipelineResult {
    std::vector<WellFrame> frames; // ordered by (well_id, hole_id)
    PipelineManifest manifest;
    PipelineStats stats;
    std::map<std::string, ParseReport> parse_reports; // by file path
};

// parse -> clip -> bin -> fill -> merge -> label, each stage cached under
// cache_dir keyed by input digests and parameters. Deterministic: unchanged
// inputs re-run zero stages and reproduce identical output digests.
PipelineResult run_pipeline(const PipelineConfig& config);

// Loads every cache/<well>/<hole>.frame under cache_dir.
std::vector<WellFrame> load_cached_frames(const std::string& cache_dir);

PipelineManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const PipelineManifest& manifest);

} // namespace litho::ingest
