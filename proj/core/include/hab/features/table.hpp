#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "hab/features/climate.hpp"
#include "hab/features/dem.hpp"
#include "hab/features/patch.hpp"
#include "hab/io/container.hpp"
#include "hab/types.hpp"

namespace hab::feat {

inline constexpr std::size_t kFeatureCount = 45;
inline constexpr std::size_t kPatchChannels = 7;

/// Fixed column order of the model table:
///   [0..20]  per-channel mean/median/std, channel-major (7 channels)
///   [21..23] band indices c3c2, c3c4, c5c4 (from channel medians)
///   [24..26] month, year, dayofweek
///   [27..28] latitude, longitude
///   [29..40] climate statistics
///   [41..44] altitude, dem mean, dem median, dem std
const std::array<std::string_view, kFeatureCount>& feature_names();

using FeatureRow = std::array<double, kFeatureCount>;

struct DateFeatures {
    int month;      // 1..12
    int year;       // four digits
    int dayofweek;  // Monday = 0
};

DateFeatures date_features(const Date& date);

/// One sample's feature vector. Absent sources fill their columns with the
/// sentinel; a patch may be substituted by the synthetic mean image when
/// imputation applies to this row. The patch must already be 32x32.
FeatureRow assemble_row(const SampleMeta& meta, const PatchImage* patch,
                        const ClimateSeries* climate, const ElevationRecord* elevation,
                        const PatchImage* synthetic, bool impute_this_row);

enum class ImputeMode { Off, TrainOnly, TestOnly, All };

ImputeMode parse_impute_mode(std::string_view text);
std::string_view impute_mode_name(ImputeMode mode);

struct FeatureTable {
    std::vector<std::string> uids;
    Matrix features;  // n x 45
};

struct FeatureBuildStats {
    std::size_t rows = 0;
    std::size_t missing_patches = 0;
    std::size_t missing_climate = 0;
    std::size_t missing_dem = 0;
    std::size_t imputed_patches = 0;
};

/// Joins containers to metadata by uid (metadata order wins), center-crops
/// imagery, computes the synthetic mean image once when imputation is on,
/// then assembles rows in parallel. Null dataset pointers mean the source is
/// unavailable; those columns become sentinels.
FeatureTable build_feature_table(const std::vector<SampleMeta>& metadata,
                                 const io::PatchDataset* patches,
                                 const io::ClimateDataset* climate,
                                 const io::DemDataset* dem, ImputeMode impute,
                                 FeatureBuildStats* stats = nullptr);

// Feature-table files: CSV (uid + 45 named columns, shortest round-trip
// decimals) and a raw row-major binary64 little-endian sidecar matrix.
void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_feature_csv(const std::filesystem::path& path);
void write_feature_matrix(const std::filesystem::path& path, const Matrix& features);
Matrix read_feature_matrix(const std::filesystem::path& path,
                           std::size_t cols = kFeatureCount);

}  // namespace hab::feat
