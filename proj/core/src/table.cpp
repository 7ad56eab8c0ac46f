#include "hab/features/table.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include "hab/io/csv.hpp"

namespace hab::feat {

const std::array<std::string_view, kFeatureCount>& feature_names() {
    static const std::array<std::string_view, kFeatureCount> kNames = {
        "patch_mean_c1",   "patch_median_c1", "patch_std_c1",
        "patch_mean_c2",   "patch_median_c2", "patch_std_c2",
        "patch_mean_c3",   "patch_median_c3", "patch_std_c3",
        "patch_mean_c4",   "patch_median_c4", "patch_std_c4",
        "patch_mean_c5",   "patch_median_c5", "patch_std_c5",
        "patch_mean_c6",   "patch_median_c6", "patch_std_c6",
        "patch_mean_c7",   "patch_median_c7", "patch_std_c7",
        "idx_c3c2",        "idx_c3c4",        "idx_c5c4",
        "month",           "year",            "dayofweek",
        "latitude",        "longitude",
        "temp_mean",       "temp_std",        "temp_mean_fw",   "temp_std_fw",
        "rain_mean",       "rain_std",        "gust_mean",      "gust_std",
        "snowc_mean",      "snowc_std",       "hgt_mean",       "hgt_std",
        "altitude",        "dem_mean",        "dem_median",     "dem_std",
    };
    return kNames;
}

DateFeatures date_features(const Date& date) {
    return {date.month, date.year, day_of_week(date)};
}

namespace {

double sanitize(double v) { return std::isfinite(v) ? v : kSentinel; }

}  // namespace

FeatureRow assemble_row(const SampleMeta& meta, const PatchImage* patch,
                        const ClimateSeries* climate, const ElevationRecord* elevation,
                        const PatchImage* synthetic, bool impute_this_row) {
    FeatureRow row;
    row.fill(kSentinel);

    const PatchImage* effective = (patch != nullptr && patch->present) ? patch : nullptr;
    if (effective == nullptr && impute_this_row && synthetic != nullptr &&
        synthetic->present)
        effective = synthetic;
    if (effective != nullptr) {
        auto stats = channel_stats(*effective);
        if (stats.size() != kPatchChannels)
            throw InputError("patch must have 7 channels");
        for (std::size_t c = 0; c < kPatchChannels; ++c) {
            row[c * 3 + 0] = sanitize(stats[c].mean);
            row[c * 3 + 1] = sanitize(stats[c].median);
            row[c * 3 + 2] = sanitize(stats[c].stddev);
        }
        // Band indices use the stored channel positions: c3/c2, c3/c4, c5/c4.
        row[21] = band_index(stats[2].median, stats[1].median);
        row[22] = band_index(stats[2].median, stats[3].median);
        row[23] = band_index(stats[4].median, stats[3].median);
    }

    DateFeatures d = date_features(meta.date);
    row[24] = d.month;
    row[25] = d.year;
    row[26] = d.dayofweek;
    row[27] = sanitize(meta.latitude);
    row[28] = sanitize(meta.longitude);

    if (climate != nullptr) {
        auto stats = climate_stats(*climate);
        for (std::size_t i = 0; i < stats.size(); ++i) row[29 + i] = sanitize(stats[i]);
    }
    if (elevation != nullptr) {
        auto stats = dem_stats(*elevation);
        for (std::size_t i = 0; i < stats.size(); ++i) row[41 + i] = sanitize(stats[i]);
    }
    return row;
}

ImputeMode parse_impute_mode(std::string_view text) {
    if (text == "off") return ImputeMode::Off;
    if (text == "train") return ImputeMode::TrainOnly;
    if (text == "test") return ImputeMode::TestOnly;
    if (text == "all" || text == "on") return ImputeMode::All;
    throw InputError("unknown imputation mode '" + std::string(text) + "'");
}

std::string_view impute_mode_name(ImputeMode mode) {
    switch (mode) {
        case ImputeMode::Off: return "off";
        case ImputeMode::TrainOnly: return "train";
        case ImputeMode::TestOnly: return "test";
        case ImputeMode::All: return "all";
    }
    return "off";
}

namespace {

bool impute_applies(ImputeMode mode, Split split) {
    switch (mode) {
        case ImputeMode::Off: return false;
        case ImputeMode::TrainOnly: return split == Split::Train;
        case ImputeMode::TestOnly: return split == Split::Test;
        case ImputeMode::All: return true;
    }
    return false;
}

template <typename Dataset>
std::unordered_map<std::string, std::size_t> index_by_uid(const Dataset& data) {
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(data.uids.size());
    for (std::size_t i = 0; i < data.uids.size(); ++i) {
        if (!index.emplace(data.uids[i], i).second)
            throw InputError("duplicate uid '" + data.uids[i] + "' in container");
    }
    return index;
}

}  // namespace

FeatureTable build_feature_table(const std::vector<SampleMeta>& metadata,
                                 const io::PatchDataset* patches,
                                 const io::ClimateDataset* climate,
                                 const io::DemDataset* dem, ImputeMode impute,
                                 FeatureBuildStats* stats) {
    std::size_t n = metadata.size();

    std::unordered_map<std::string, std::size_t> patch_index, climate_index, dem_index;
    if (patches != nullptr) patch_index = index_by_uid(*patches);
    if (climate != nullptr) climate_index = index_by_uid(*climate);
    if (dem != nullptr) dem_index = index_by_uid(*dem);

    // Crop each present patch once; keep per-row pointers afterwards.
    std::vector<PatchImage> cropped(n);
    std::vector<const PatchImage*> cropped_ptrs(n, nullptr);
    if (patches != nullptr) {
        if (patches->channels != kPatchChannels)
            throw InputError("patch container must have 7 channels");
        std::vector<std::size_t> patch_of(n, static_cast<std::size_t>(-1));
        for (std::size_t i = 0; i < n; ++i) {
            auto it = patch_index.find(metadata[i].uid);
            if (it != patch_index.end() && patches->present[it->second])
                patch_of[i] = it->second;
        }
        parallel_for(n, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                if (patch_of[i] == static_cast<std::size_t>(-1)) continue;
                PatchImage raw;
                raw.height = patches->height;
                raw.width = patches->width;
                raw.channels = patches->channels;
                raw.present = true;
                raw.pixels = patches->pixels[patch_of[i]];
                cropped[i] = center_crop(raw);
                cropped_ptrs[i] = &cropped[i];
            }
        });
    }

    // The synthetic stand-in is a single pass over present patches, done
    // before the parallel assembly below.
    PatchImage synthetic;
    if (impute != ImputeMode::Off) {
        bool any_present = false;
        for (auto* p : cropped_ptrs) any_present |= p != nullptr;
        if (any_present)
            synthetic = synth_mean_image(
                std::span<const PatchImage* const>(cropped_ptrs.data(), n));
    }

    FeatureTable table;
    table.uids.reserve(n);
    for (const auto& m : metadata) table.uids.push_back(m.uid);
    table.features = Matrix(n, kFeatureCount);

    FeatureBuildStats local;
    local.rows = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (cropped_ptrs[i] == nullptr) ++local.missing_patches;
        if (climate == nullptr || climate_index.find(metadata[i].uid) == climate_index.end() ||
            !climate->present[climate_index.at(metadata[i].uid)])
            ++local.missing_climate;
        if (dem == nullptr || dem_index.find(metadata[i].uid) == dem_index.end() ||
            !dem->present[dem_index.at(metadata[i].uid)])
            ++local.missing_dem;
    }

    std::vector<std::uint8_t> imputed(n, 0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const SampleMeta& meta = metadata[i];

            ClimateSeries series;
            const ClimateSeries* series_ptr = nullptr;
            if (climate != nullptr) {
                auto it = climate_index.find(meta.uid);
                if (it != climate_index.end() && climate->present[it->second]) {
                    series.present = true;
                    series.values = climate->series[it->second];
                    series_ptr = &series;
                }
            }

            ElevationRecord elev;
            const ElevationRecord* elev_ptr = nullptr;
            if (dem != nullptr) {
                auto it = dem_index.find(meta.uid);
                if (it != dem_index.end() && dem->present[it->second]) {
                    elev.present = true;
                    elev.altitude = dem->altitude[it->second];
                    elev.dem.height = io::DemDataset::kSide;
                    elev.dem.width = io::DemDataset::kSide;
                    elev.dem.channels = 1;
                    elev.dem.present = true;
                    elev.dem.pixels = dem->pixels[it->second];
                    elev_ptr = &elev;
                }
            }

            bool impute_row = impute_applies(impute, meta.split) && synthetic.present;
            if (impute_row && cropped_ptrs[i] == nullptr) imputed[i] = 1;
            FeatureRow row = assemble_row(meta, cropped_ptrs[i], series_ptr, elev_ptr,
                                          synthetic.present ? &synthetic : nullptr,
                                          impute_row);
            for (std::size_t c = 0; c < kFeatureCount; ++c) table.features.at(i, c) = row[c];
        }
    });
    for (auto flag : imputed) local.imputed_patches += flag;

    if (stats != nullptr) *stats = local;
    return table;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    out << "uid";
    for (auto name : feature_names()) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < table.uids.size(); ++i) {
        out << table.uids[i];
        for (std::size_t c = 0; c < kFeatureCount; ++c)
            out << ',' << format_double(table.features.at(i, c));
        out << '\n';
    }
}

FeatureTable read_feature_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::string name = path.filename().string();
    std::string line;
    std::size_t line_no = 0;
    FeatureTable table;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = io::split_csv_line(line);
        if (line_no == 1) {
            if (fields.size() != kFeatureCount + 1 || fields[0] != "uid")
                throw InputError(name + ": feature header must be uid + 45 feature names");
            for (std::size_t c = 0; c < kFeatureCount; ++c)
                if (fields[c + 1] != feature_names()[c])
                    throw InputError(name + ": feature column " + std::to_string(c) +
                                     " must be '" + std::string(feature_names()[c]) +
                                     "', got '" + fields[c + 1] + "'");
            continue;
        }
        if (fields.size() != kFeatureCount + 1)
            throw InputError(name + " line " + std::to_string(line_no) +
                             ": expected 46 fields");
        table.uids.push_back(fields[0]);
        for (std::size_t c = 0; c < kFeatureCount; ++c)
            values.push_back(io::parse_csv_double(
                fields[c + 1], name + " line " + std::to_string(line_no)));
    }
    if (line_no == 0) throw InputError(name + ": empty file, header row required");
    table.features.rows = table.uids.size();
    table.features.cols = kFeatureCount;
    table.features.values = std::move(values);
    return table;
}

void write_feature_matrix(const std::filesystem::path& path, const Matrix& features) {
    static_assert(std::endian::native == std::endian::little);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(features.values.data()),
              static_cast<std::streamsize>(features.values.size() * sizeof(double)));
    if (!out) throw InputError("short write to " + path.string());
}

Matrix read_feature_matrix(const std::filesystem::path& path, std::size_t cols) {
    auto bytes = io::read_file_bytes(path);
    if (cols == 0 || bytes.size() % (cols * sizeof(double)) != 0)
        throw InputError(path.string() + ": size is not a whole number of rows");
    Matrix m;
    m.cols = cols;
    m.rows = bytes.size() / (cols * sizeof(double));
    m.values.resize(m.rows * m.cols);
    std::memcpy(m.values.data(), bytes.data(), bytes.size());
    return m;
}

}  // namespace hab::feat
