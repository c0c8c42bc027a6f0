#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "litho/errors.hpp"

namespace litho {

// The eight measured telemetry channels, SI units after ingestion:
// WOB [N], TRQ [N*m], ROP [m/s], RPM [rev/s], QIN/QOUT [m^3/s],
// SPP [Pa], HL [N].
enum class ChannelId : std::uint8_t {
    WOB = 0,
    TRQ,
    ROP,
    RPM,
    QIN,
    QOUT,
    SPP,
    HL,
};

inline constexpr std::size_t kNumChannels = 8;

inline constexpr std::array<ChannelId, kNumChannels> kAllChannels{
    ChannelId::WOB, ChannelId::TRQ, ChannelId::ROP, ChannelId::RPM,
    ChannelId::QIN, ChannelId::QOUT, ChannelId::SPP, ChannelId::HL,
};

std::string_view channel_name(ChannelId id);
std::optional<ChannelId> channel_from_name(std::string_view name);

// Fixed 0.1 m depth grid. Bin i covers [start_depth + 0.1*i, start_depth + 0.1*(i+1)).
struct DepthGrid {
    double start_depth = 0.0;
    double bin_size = 0.1;
    std::size_t n_bins = 0;

    static constexpr double kBinSize = 0.1;

    void validate() const;

    double bin_top(std::size_t i) const { return start_depth + bin_size * static_cast<double>(i); }
    double bin_mid(std::size_t i) const { return bin_top(i) + 0.5 * bin_size; }

    // Index of the bin containing `depth`, or nullopt when outside the grid.
    // A 1e-9 m slack absorbs representation noise at bin boundaries so that
    // bin_of(bin_top(i)) == i for every i.
    std::optional<std::size_t> bin_of(double depth) const;
};

// A per-bin series of optional real values. `value[i]` is meaningful only
// where `present[i]` is nonzero; missingness is carried by the mask, never
// by a sentinel value.
struct OptSeries {
    std::vector<double> value;
    std::vector<std::uint8_t> present;

    OptSeries() = default;
    explicit OptSeries(std::size_t n) { resize(n); }

    std::size_t size() const { return value.size(); }
    void resize(std::size_t n) {
        value.assign(n, 0.0);
        present.assign(n, 0);
    }
    bool has(std::size_t i) const { return present[i] != 0; }
    void set(std::size_t i, double v) {
        value[i] = v;
        present[i] = 1;
    }
    void clear(std::size_t i) {
        value[i] = 0.0;
        present[i] = 0;
    }
    std::size_t count_present() const;

    bool operator==(const OptSeries& other) const;
};

// Per-bin class labels: 0 = sand, 1 = shale/hard-rock.
struct LabelSeries {
    std::vector<std::uint8_t> cls;
    std::vector<std::uint8_t> present;

    LabelSeries() = default;
    explicit LabelSeries(std::size_t n) { resize(n); }

    std::size_t size() const { return cls.size(); }
    void resize(std::size_t n) {
        cls.assign(n, 0);
        present.assign(n, 0);
    }
    bool has(std::size_t i) const { return present[i] != 0; }
    void set(std::size_t i, std::uint8_t c) {
        cls[i] = c;
        present[i] = 1;
    }

    bool operator==(const LabelSeries& other) const;
};

// Depth-gridded multichannel telemetry plus per-bin labels for one lateral.
// Immutable after construction by convention; safe to share read-only
// across workers.
struct WellFrame {
    std::string well_id;
    std::string hole_id;
    DepthGrid grid;
    std::array<OptSeries, kNumChannels> channels;
    std::array<OptSeries, kNumChannels> within_bin_std;
    LabelSeries labels;
    double bit_area = 0.0; // wellbore cross-section [m^2]

    const OptSeries& channel(ChannelId id) const { return channels[static_cast<std::size_t>(id)]; }
    OptSeries& channel(ChannelId id) { return channels[static_cast<std::size_t>(id)]; }
    const OptSeries& fluctuation(ChannelId id) const {
        return within_bin_std[static_cast<std::size_t>(id)];
    }
    OptSeries& fluctuation(ChannelId id) {
        return within_bin_std[static_cast<std::size_t>(id)];
    }

    void validate() const;

    bool operator==(const WellFrame& other) const;
};

// Scored bins with physical lengths, the unit of metric computation.
struct LabeledBins {
    std::vector<double> lengths; // [m], all > 0
    std::vector<std::uint8_t> y;
    std::vector<double> scores; // probability of class 1

    void validate() const;
};

// Share of shale/hard-rock among labeled bins. Throws DataError when no
// bin is labeled.
double class_share(const WellFrame& frame);

} // namespace litho
