#include "litho/frame_io.hpp"

#include <filesystem>
#include <fstream>

#include "litho/serialize.hpp"

namespace litho {

namespace {

constexpr char kMagic[9] = "LITHOFRM";
constexpr std::uint32_t kVersion = 1;

void put_series(ByteWriter& w, const OptSeries& s) {
    w.u64(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) w.f64(s.has(i) ? s.value[i] : 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) w.u8(s.present[i] ? 1 : 0);
}

OptSeries get_series(ByteReader& r) {
    const std::uint64_t n = r.u64();
    OptSeries s(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < n; ++i) s.value[i] = r.f64();
    for (std::size_t i = 0; i < n; ++i) s.present[i] = r.u8();
    for (std::size_t i = 0; i < n; ++i) {
        if (!s.present[i]) s.value[i] = 0.0;
    }
    return s;
}

} // namespace

std::vector<std::uint8_t> encode_frame(const WellFrame& frame) {
    ByteWriter w;
    w.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(kMagic), 8));
    w.u32(kVersion);
    w.str(frame.well_id);
    w.str(frame.hole_id);
    w.f64(frame.grid.start_depth);
    w.f64(frame.grid.bin_size);
    w.u64(frame.grid.n_bins);
    w.f64(frame.bit_area);
    for (const OptSeries& s : frame.channels) put_series(w, s);
    for (const OptSeries& s : frame.within_bin_std) put_series(w, s);
    w.u64(frame.labels.size());
    for (std::size_t i = 0; i < frame.labels.size(); ++i)
        w.u8(frame.labels.has(i) ? frame.labels.cls[i] : 0);
    for (std::size_t i = 0; i < frame.labels.size(); ++i) w.u8(frame.labels.present[i] ? 1 : 0);
    return w.take();
}

WellFrame decode_frame(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    const auto magic = r.take(8);
    if (std::memcmp(magic.data(), kMagic, 8) != 0) throw DataError("not a frame file");
    if (r.u32() != kVersion) throw DataError("unsupported frame file version");
    WellFrame f;
    f.well_id = r.str();
    f.hole_id = r.str();
    f.grid.start_depth = r.f64();
    f.grid.bin_size = r.f64();
    f.grid.n_bins = static_cast<std::size_t>(r.u64());
    f.bit_area = r.f64();
    for (OptSeries& s : f.channels) s = get_series(r);
    for (OptSeries& s : f.within_bin_std) s = get_series(r);
    const std::uint64_t n = r.u64();
    f.labels.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < n; ++i) f.labels.cls[i] = r.u8();
    for (std::size_t i = 0; i < n; ++i) f.labels.present[i] = r.u8();
    for (std::size_t i = 0; i < n; ++i) {
        if (!f.labels.present[i]) f.labels.cls[i] = 0;
    }
    return f;
}

void write_frame_file(const std::string& path, const WellFrame& frame) {
    const auto bytes = encode_frame(frame);
    write_file_bytes(path, bytes);
}

WellFrame read_frame_file(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    return decode_frame(bytes);
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    in.seekg(0, std::ios::end);
    const auto size = in.tellg();
    in.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw DataError("failed reading file: " + path);
    return bytes;
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("failed writing file: " + path);
}

} // namespace litho
