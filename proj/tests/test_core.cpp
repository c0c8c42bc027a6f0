#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "litho/core.hpp"
#include "litho/frame_io.hpp"

using namespace litho;

namespace {

WellFrame small_frame() {
    WellFrame f;
    f.well_id = "W07";
    f.hole_id = "H2";
    f.grid.start_depth = 1000.0;
    f.grid.n_bins = 4;
    f.bit_area = 0.05;
    for (OptSeries& s : f.channels) s.resize(4);
    for (OptSeries& s : f.within_bin_std) s.resize(4);
    f.labels.resize(4);
    f.channel(ChannelId::WOB).set(0, 50e3);
    f.channel(ChannelId::WOB).set(2, 51e3);
    f.fluctuation(ChannelId::WOB).set(0, 120.0);
    return f;
}

} // namespace

TEST_CASE("channel names round-trip and stay stable") {
    CHECK(kAllChannels.size() == 8);
    for (ChannelId id : kAllChannels) {
        const auto back = channel_from_name(channel_name(id));
        REQUIRE(back.has_value());
        CHECK(*back == id);
    }
    CHECK_FALSE(channel_from_name("BOGUS").has_value());
}

TEST_CASE("bin index and depth are exact inverses") {
    DepthGrid grid;
    grid.start_depth = 2741.3;
    grid.n_bins = 5000;
    for (std::size_t i = 0; i < grid.n_bins; i += 7) {
        auto at_top = grid.bin_of(grid.bin_top(i));
        auto at_mid = grid.bin_of(grid.bin_mid(i));
        REQUIRE(at_top.has_value());
        REQUIRE(at_mid.has_value());
        CHECK(*at_top == i);
        CHECK(*at_mid == i);
    }
    CHECK_FALSE(grid.bin_of(grid.start_depth - 0.05).has_value());
    CHECK_FALSE(grid.bin_of(grid.bin_top(grid.n_bins)).has_value());
}

TEST_CASE("grid validation rejects non-canonical bin size") {
    DepthGrid grid;
    grid.bin_size = 0.2;
    grid.n_bins = 10;
    CHECK_THROWS_AS(grid.validate(), DataError);
    grid.bin_size = 0.1;
    grid.n_bins = 0;
    CHECK_THROWS_AS(grid.validate(), DataError);
}

TEST_CASE("class_share counts labeled bins only") {
    WellFrame f = small_frame();
    f.labels.set(0, 1);
    f.labels.set(1, 1);
    f.labels.set(2, 1);
    f.labels.set(3, 1);
    CHECK(class_share(f) == 1.0); // all labeled 1

    WellFrame g = small_frame();
    g.labels.set(0, 0);
    g.labels.set(1, 0);
    g.labels.set(2, 0);
    g.labels.set(3, 1);
    CHECK(class_share(g) == 0.25);

    WellFrame h = small_frame();
    h.grid.n_bins = 3;
    for (OptSeries& s : h.channels) s.resize(3);
    for (OptSeries& s : h.within_bin_std) s.resize(3);
    h.labels.resize(3);
    h.labels.set(0, 0);
    h.labels.set(2, 1); // middle bin unlabeled
    CHECK(class_share(h) == 0.5);

    WellFrame none = small_frame();
    CHECK_THROWS_AS(class_share(none), DataError);
}

TEST_CASE("frame validation catches contract violations") {
    WellFrame f = small_frame();
    f.labels.set(0, 1);
    CHECK_NOTHROW(f.validate());

    WellFrame bad_area = f;
    bad_area.bit_area = 0.0;
    CHECK_THROWS_AS(bad_area.validate(), DataError);

    WellFrame bad_len = f;
    bad_len.channel(ChannelId::SPP).resize(3);
    CHECK_THROWS_AS(bad_len.validate(), DataError);

    WellFrame bad_std = f;
    bad_std.fluctuation(ChannelId::TRQ).set(1, -0.5);
    CHECK_THROWS_AS(bad_std.validate(), DataError);
}

TEST_CASE("frame serialization round-trips exactly, missing markers included") {
    WellFrame f = small_frame();
    f.labels.set(1, 1);
    f.labels.set(3, 0);
    f.channel(ChannelId::ROP).set(1, 7.25e-3);
    f.channel(ChannelId::TRQ).set(3, 5321.75);

    const auto bytes = encode_frame(f);
    const WellFrame back = decode_frame(bytes);
    CHECK(back == f);

    // Re-encoding is byte-stable (digest determinism for the cache).
    CHECK(encode_frame(back) == bytes);
}
