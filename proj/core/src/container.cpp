#include "hab/io/container.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace hab::io {

namespace {

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");
static_assert(sizeof(float) == 4);

class ByteReader {
public:
    ByteReader(const std::vector<std::uint8_t>& bytes, std::string name)
        : bytes_(bytes), name_(std::move(name)) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    void require(std::size_t n, const char* what) const {
        if (remaining() < n)
            throw ContainerError(name_ + ": truncated " + what, pos_);
    }

    std::uint8_t u8(const char* what) {
        require(1, what);
        return bytes_[pos_++];
    }
    std::uint16_t u16(const char* what) {
        require(2, what);
        std::uint16_t v;
        std::memcpy(&v, bytes_.data() + pos_, 2);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32(const char* what) {
        require(4, what);
        std::uint32_t v;
        std::memcpy(&v, bytes_.data() + pos_, 4);
        pos_ += 4;
        return v;
    }
    float f32(const char* what) {
        require(4, what);
        float v;
        std::memcpy(&v, bytes_.data() + pos_, 4);
        pos_ += 4;
        return v;
    }
    void raw(void* out, std::size_t n, const char* what) {
        require(n, what);
        std::memcpy(out, bytes_.data() + pos_, n);
        pos_ += n;
    }
    std::string str16(const char* what) {
        std::uint16_t len = u16(what);
        require(len, what);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
        pos_ += len;
        return s;
    }
    void fail(const std::string& message) const {
        throw ContainerError(name_ + ": " + message, pos_);
    }
    void fail_at(const std::string& message, std::size_t at) const {
        throw ContainerError(name_ + ": " + message, at);
    }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::string name_;
    std::size_t pos_ = 0;
};

class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v) { raw(&v, 2); }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void f32(float v) { raw(&v, 4); }
    void raw(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        bytes_.insert(bytes_.end(), p, p + n);
    }
    void str16(const std::string& s) {
        if (s.size() > 0xFFFF) throw InputError("uid longer than 65535 bytes");
        u16(static_cast<std::uint16_t>(s.size()));
        raw(s.data(), s.size());
    }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

struct Header {
    std::uint32_t n = 0;
    std::uint16_t height = 0, width = 0, channels = 0;
    std::vector<std::uint8_t> present;
    std::vector<std::string> uids;
};

Header read_header(ByteReader& r, const char expected_magic[4]) {
    char magic[4];
    r.raw(magic, 4, "magic");
    if (std::memcmp(magic, expected_magic, 4) != 0)
        r.fail_at(std::string("bad magic, expected ") + expected_magic, 0);
    std::uint16_t version = r.u16("version");
    if (version != kContainerVersion)
        r.fail_at("unsupported container version " + std::to_string(version), 4);
    Header h;
    h.n = r.u32("sample count");
    h.height = r.u16("height");
    h.width = r.u16("width");
    h.channels = r.u16("channels");
    std::size_t bitmap_bytes = (static_cast<std::size_t>(h.n) + 7) / 8;
    std::vector<std::uint8_t> bitmap(bitmap_bytes);
    r.raw(bitmap.data(), bitmap_bytes, "presence bitmap");
    h.present.resize(h.n);
    for (std::uint32_t i = 0; i < h.n; ++i)
        h.present[i] = (bitmap[i >> 3] >> (i & 7)) & 1;
    h.uids.reserve(h.n);
    for (std::uint32_t i = 0; i < h.n; ++i) h.uids.push_back(r.str16("uid index"));
    return h;
}

void write_header(ByteWriter& w, const char magic[4], std::uint32_t n,
                  std::uint16_t height, std::uint16_t width, std::uint16_t channels,
                  const std::vector<std::uint8_t>& present,
                  const std::vector<std::string>& uids) {
    w.raw(magic, 4);
    w.u16(kContainerVersion);
    w.u32(n);
    w.u16(height);
    w.u16(width);
    w.u16(channels);
    std::vector<std::uint8_t> bitmap((static_cast<std::size_t>(n) + 7) / 8, 0);
    for (std::uint32_t i = 0; i < n; ++i)
        if (present[i]) bitmap[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
    w.raw(bitmap.data(), bitmap.size());
    for (const auto& uid : uids) w.str16(uid);
}

std::size_t present_count(const std::vector<std::uint8_t>& present) {
    std::size_t c = 0;
    for (auto p : present) c += p != 0;
    return c;
}

void check_consistency(std::size_t n_uids, std::size_t n_present,
                       std::size_t n_payload) {
    if (n_uids != n_present || n_uids != n_payload)
        throw InputError("container fields disagree on sample count");
}

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("short write to " + path.string());
}

PatchDataset read_patch_container(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    ByteReader r(bytes, path.filename().string());
    Header h = read_header(r, "HABP");
    std::size_t sample_bytes = static_cast<std::size_t>(h.height) * h.width * h.channels;
    std::size_t expected = present_count(h.present) * sample_bytes;
    if (r.remaining() != expected)
        r.fail("payload is " + std::to_string(r.remaining()) + " bytes, header declares " +
               std::to_string(expected));
    PatchDataset out;
    out.height = h.height;
    out.width = h.width;
    out.channels = h.channels;
    out.uids = std::move(h.uids);
    out.present = std::move(h.present);
    out.pixels.resize(out.uids.size());
    for (std::size_t i = 0; i < out.uids.size(); ++i) {
        if (!out.present[i]) continue;
        out.pixels[i].resize(sample_bytes);
        r.raw(out.pixels[i].data(), sample_bytes, "patch payload");
    }
    return out;
}

void write_patch_container(const std::filesystem::path& path, const PatchDataset& data) {
    check_consistency(data.uids.size(), data.present.size(), data.pixels.size());
    std::size_t sample_bytes =
        static_cast<std::size_t>(data.height) * data.width * data.channels;
    ByteWriter w;
    write_header(w, "HABP", static_cast<std::uint32_t>(data.uids.size()), data.height,
                 data.width, data.channels, data.present, data.uids);
    for (std::size_t i = 0; i < data.uids.size(); ++i) {
        if (!data.present[i]) continue;
        if (data.pixels[i].size() != sample_bytes)
            throw InputError("patch " + data.uids[i] + " has wrong pixel count");
        w.raw(data.pixels[i].data(), sample_bytes);
    }
    write_file_bytes(path, w.take());
}

ClimateDataset read_climate_container(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    ByteReader r(bytes, path.filename().string());
    Header h = read_header(r, "HABC");
    if (h.height != ClimateDataset::kDays || h.width != ClimateDataset::kVars ||
        h.channels != 1)
        r.fail_at("climate container must be 28x5x1", 10);
    constexpr std::size_t kValues =
        std::size_t{ClimateDataset::kDays} * ClimateDataset::kVars;
    std::size_t expected = present_count(h.present) * kValues * 4;
    if (r.remaining() != expected)
        r.fail("payload is " + std::to_string(r.remaining()) + " bytes, header declares " +
               std::to_string(expected));
    ClimateDataset out;
    out.uids = std::move(h.uids);
    out.present = std::move(h.present);
    out.series.resize(out.uids.size());
    for (std::size_t i = 0; i < out.uids.size(); ++i) {
        if (!out.present[i]) continue;
        out.series[i].resize(kValues);
        r.raw(out.series[i].data(), kValues * 4, "climate payload");
    }
    return out;
}

void write_climate_container(const std::filesystem::path& path, const ClimateDataset& data) {
    check_consistency(data.uids.size(), data.present.size(), data.series.size());
    constexpr std::size_t kValues =
        std::size_t{ClimateDataset::kDays} * ClimateDataset::kVars;
    ByteWriter w;
    write_header(w, "HABC", static_cast<std::uint32_t>(data.uids.size()),
                 ClimateDataset::kDays, ClimateDataset::kVars, 1, data.present, data.uids);
    for (std::size_t i = 0; i < data.uids.size(); ++i) {
        if (!data.present[i]) continue;
        if (data.series[i].size() != kValues)
            throw InputError("climate record " + data.uids[i] + " must hold 140 values");
        w.raw(data.series[i].data(), kValues * 4);
    }
    write_file_bytes(path, w.take());
}

DemDataset read_dem_container(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    ByteReader r(bytes, path.filename().string());
    Header h = read_header(r, "HABD");
    if (h.height != DemDataset::kSide || h.width != DemDataset::kSide || h.channels != 1)
        r.fail_at("dem container must be 32x32x1", 10);
    DemDataset out;
    out.uids = std::move(h.uids);
    out.present = std::move(h.present);
    out.altitude.resize(out.uids.size());
    for (std::size_t i = 0; i < out.uids.size(); ++i) {
        std::size_t at = r.offset();
        out.altitude[i] = r.f32("altitude column");
        if (out.present[i] && !std::isfinite(out.altitude[i]))
            r.fail_at("altitude must be finite for present sample " + out.uids[i], at);
    }
    constexpr std::size_t kPixels = std::size_t{DemDataset::kSide} * DemDataset::kSide;
    std::size_t expected = present_count(out.present) * kPixels;
    if (r.remaining() != expected)
        r.fail("payload is " + std::to_string(r.remaining()) + " bytes, header declares " +
               std::to_string(expected));
    out.pixels.resize(out.uids.size());
    for (std::size_t i = 0; i < out.uids.size(); ++i) {
        if (!out.present[i]) continue;
        out.pixels[i].resize(kPixels);
        r.raw(out.pixels[i].data(), kPixels, "dem payload");
    }
    return out;
}

void write_dem_container(const std::filesystem::path& path, const DemDataset& data) {
    check_consistency(data.uids.size(), data.present.size(), data.pixels.size());
    if (data.altitude.size() != data.uids.size())
        throw InputError("dem altitude column length mismatch");
    constexpr std::size_t kPixels = std::size_t{DemDataset::kSide} * DemDataset::kSide;
    ByteWriter w;
    write_header(w, "HABD", static_cast<std::uint32_t>(data.uids.size()),
                 DemDataset::kSide, DemDataset::kSide, 1, data.present, data.uids);
    for (std::size_t i = 0; i < data.uids.size(); ++i) {
        if (data.present[i] && !std::isfinite(data.altitude[i]))
            throw InputError("altitude must be finite for present sample " + data.uids[i]);
        w.f32(data.altitude[i]);
    }
    for (std::size_t i = 0; i < data.uids.size(); ++i) {
        if (!data.present[i]) continue;
        if (data.pixels[i].size() != kPixels)
            throw InputError("dem patch " + data.uids[i] + " must be 32x32");
        w.raw(data.pixels[i].data(), kPixels);
    }
    write_file_bytes(path, w.take());
}

}  // namespace hab::io
