#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hab/common.hpp"

namespace hab::io {

// ---------------------------------------------------------------------------
// Binary container family. One layout, four magics:
//
//   HABP  patch imagery     payload u8,  per present sample H*W*C bytes
//   HABC  climate series    payload f32, per present sample H*W*C values
//   HABD  elevation patches payload u8, plus an altitude column (see below)
//   HABM  tree models       separate layout, see model_io.hpp
//
// Common layout, all integers little-endian, floats IEEE-754 binary32:
//
//   magic      4 bytes
//   version    u16          (currently 1)
//   n_samples  u32
//   height     u16
//   width      u16
//   channels   u16
//   presence   ceil(n/8) bytes, sample i present iff bit (i & 7) of
//              byte (i >> 3) is set (LSB-first)
//   uid index  n strings, each u16 length prefix + UTF-8 bytes
//   [HABD only] altitude column: n f32 values, NaN where absent
//   payload    present samples only, in uid-index order; pixels row-major,
//              channel-last
//
// Trailing bytes after the payload are rejected, so write/read round-trips
// are byte-identical in both directions. Readers validate declared sizes
// against the actual byte range before allocating payload buffers.
// ---------------------------------------------------------------------------

inline constexpr std::uint16_t kContainerVersion = 1;

struct PatchDataset {
    std::uint16_t height = 0;
    std::uint16_t width = 0;
    std::uint16_t channels = 0;
    std::vector<std::string> uids;
    std::vector<std::uint8_t> present;             // 0/1 per sample
    std::vector<std::vector<std::uint8_t>> pixels; // empty vector when absent

    std::size_t size() const { return uids.size(); }
};

struct ClimateDataset {
    static constexpr std::uint16_t kDays = 28;
    static constexpr std::uint16_t kVars = 5;  // temperature, rain, gust, snowc, hgt

    std::vector<std::string> uids;
    std::vector<std::uint8_t> present;
    std::vector<std::vector<float>> series;  // 140 values day-major, NaN = missing cell

    std::size_t size() const { return uids.size(); }
};

struct DemDataset {
    static constexpr std::uint16_t kSide = 32;

    std::vector<std::string> uids;
    std::vector<std::uint8_t> present;
    std::vector<float> altitude;                   // NaN when absent
    std::vector<std::vector<std::uint8_t>> pixels; // 32x32, empty when absent

    std::size_t size() const { return uids.size(); }
};

PatchDataset read_patch_container(const std::filesystem::path& path);
void write_patch_container(const std::filesystem::path& path, const PatchDataset& data);

ClimateDataset read_climate_container(const std::filesystem::path& path);
void write_climate_container(const std::filesystem::path& path, const ClimateDataset& data);

DemDataset read_dem_container(const std::filesystem::path& path);
void write_dem_container(const std::filesystem::path& path, const DemDataset& data);

// Shared low-level helpers (also used by model persistence).
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& bytes);

}  // namespace hab::io
