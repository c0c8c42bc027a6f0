#include "litho/core.hpp"

#include <cmath>

namespace litho {

std::string_view channel_name(ChannelId id) {
    switch (id) {
        case ChannelId::WOB: return "WOB";
        case ChannelId::TRQ: return "TRQ";
        case ChannelId::ROP: return "ROP";
        case ChannelId::RPM: return "RPM";
        case ChannelId::QIN: return "QIN";
        case ChannelId::QOUT: return "QOUT";
        case ChannelId::SPP: return "SPP";
        case ChannelId::HL: return "HL";
    }
    return "?";
}

std::optional<ChannelId> channel_from_name(std::string_view name) {
    for (ChannelId id : kAllChannels) {
        if (channel_name(id) == name) return id;
    }
    return std::nullopt;
}

void DepthGrid::validate() const {
    if (bin_size != kBinSize) throw DataError("DepthGrid: bin_size must be exactly 0.1 m");
    if (n_bins < 1) throw DataError("DepthGrid: n_bins must be >= 1");
    if (!std::isfinite(start_depth)) throw DataError("DepthGrid: start_depth must be finite");
}

std::optional<std::size_t> DepthGrid::bin_of(double depth) const {
    const double x = (depth - start_depth) / bin_size + 1e-8;
    if (x < 0.0) return std::nullopt;
    const auto i = static_cast<std::size_t>(std::floor(x));
    if (i >= n_bins) return std::nullopt;
    return i;
}

std::size_t OptSeries::count_present() const {
    std::size_t n = 0;
    for (std::uint8_t p : present) n += (p != 0);
    return n;
}

bool OptSeries::operator==(const OptSeries& other) const {
    if (present != other.present) return false;
    if (value.size() != other.value.size()) return false;
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (present[i] && value[i] != other.value[i]) return false;
    }
    return true;
}

bool LabelSeries::operator==(const LabelSeries& other) const {
    if (present != other.present) return false;
    if (cls.size() != other.cls.size()) return false;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        if (present[i] && cls[i] != other.cls[i]) return false;
    }
    return true;
}

void WellFrame::validate() const {
    grid.validate();
    if (bit_area <= 0.0) throw DataError("WellFrame " + well_id + "/" + hole_id + ": bit_area must be > 0");
    const std::size_t n = grid.n_bins;
    for (ChannelId id : kAllChannels) {
        if (channel(id).size() != n)
            throw DataError("WellFrame " + well_id + "/" + hole_id + ": channel " +
                            std::string(channel_name(id)) + " length mismatch");
        const OptSeries& f = fluctuation(id);
        if (f.size() != n)
            throw DataError("WellFrame " + well_id + "/" + hole_id + ": within_bin_std " +
                            std::string(channel_name(id)) + " length mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (f.has(i) && f.value[i] < 0.0)
                throw DataError("WellFrame " + well_id + "/" + hole_id + ": negative within-bin std");
        }
    }
    if (labels.size() != n)
        throw DataError("WellFrame " + well_id + "/" + hole_id + ": labels length mismatch");
}

bool WellFrame::operator==(const WellFrame& other) const {
    if (well_id != other.well_id || hole_id != other.hole_id) return false;
    if (grid.start_depth != other.grid.start_depth || grid.bin_size != other.grid.bin_size ||
        grid.n_bins != other.grid.n_bins)
        return false;
    if (bit_area != other.bit_area) return false;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        if (!(channels[c] == other.channels[c])) return false;
        if (!(within_bin_std[c] == other.within_bin_std[c])) return false;
    }
    return labels == other.labels;
}

void LabeledBins::validate() const {
    const std::size_t n = lengths.size();
    if (y.size() != n || scores.size() != n)
        throw DataError("LabeledBins: sequences must have equal length");
    for (double l : lengths) {
        if (!(l > 0.0)) throw DataError("LabeledBins: lengths must be > 0");
    }
}

double class_share(const WellFrame& frame) {
    std::size_t labeled = 0;
    std::size_t ones = 0;
    for (std::size_t i = 0; i < frame.labels.size(); ++i) {
        if (!frame.labels.has(i)) continue;
        ++labeled;
        ones += (frame.labels.cls[i] == 1);
    }
    if (labeled == 0)
        throw DataError("class_share: frame " + frame.well_id + "/" + frame.hole_id +
                        " has no labeled bins");
    return static_cast<double>(ones) / static_cast<double>(labeled);
}

} // namespace litho
