#pragma once

// Shared test fixtures: scratch directories and the synthetic end-to-end
// dataset (sqrt-density a noiseless linear function of feature 0, class
// boundaries planted at 10/20/30/40).

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "hab/common.hpp"
#include "hab/features/table.hpp"
#include "hab/io/csv.hpp"
#include "hab/types.hpp"

namespace habtest {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("habfuse_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

struct SyntheticDataset {
    std::vector<hab::SampleMeta> metadata;
    std::vector<hab::Label> labels;  // train rows only
    hab::feat::FeatureTable table;
    std::filesystem::path metadata_csv;
    std::filesystem::path labels_csv;
    std::filesystem::path features_csv;
};

inline int planted_severity(double sqrt_density) {
    int cls = 1;
    for (double cut : {10.0, 20.0, 30.0, 40.0})
        if (cut <= sqrt_density) ++cls;
    return cls;
}

/// sqrt-density sits in per-class clusters [10k-8, 10k-2] (margin 2 around
/// each planted cut). Columns 0..14 carry monotone transforms of the signal
/// (mimicking correlated channel statistics); the rest is seeded noise.
inline SyntheticDataset make_synthetic_dataset(const std::filesystem::path& dir,
                                               std::size_t n_train, std::size_t n_test,
                                               std::uint64_t seed) {
    SyntheticDataset data;
    std::size_t n = n_train + n_test;
    hab::SplitMix64 rng(seed);
    data.table.features = hab::Matrix(n, hab::feat::kFeatureCount);

    for (std::size_t i = 0; i < n; ++i) {
        double cls = static_cast<double>(1 + i % 5);
        double s = 10.0 * cls - 8.0 + 6.0 * rng.next_unit();

        hab::SampleMeta meta;
        meta.uid = "s" + std::to_string(1000 + i);
        meta.latitude = 30.0 + 15.0 * rng.next_unit();
        meta.longitude = -110.0 + 40.0 * rng.next_unit();
        meta.date = {2018 + static_cast<int>(i % 4), 1 + static_cast<int>(i % 12),
                     1 + static_cast<int>(i % 28)};
        meta.split = i < n_train ? hab::Split::Train : hab::Split::Test;
        data.metadata.push_back(meta);

        if (meta.split == hab::Split::Train) {
            hab::Label label;
            label.uid = meta.uid;
            label.region = hab::kAllRegions[i % 4];
            label.severity = planted_severity(s);
            label.density = s * s;
            data.labels.push_back(label);
        }

        for (std::size_t c = 0; c < hab::feat::kFeatureCount; ++c) {
            if (c < 15)
                data.table.features.at(i, c) = s * (1.0 + 0.1 * static_cast<double>(c));
            else
                data.table.features.at(i, c) = rng.next_unit() * 10.0;
        }
        data.table.features.at(i, 27) = meta.latitude;
        data.table.features.at(i, 28) = meta.longitude;
        data.table.uids.push_back(meta.uid);
    }

    data.metadata_csv = dir / "metadata.csv";
    data.labels_csv = dir / "labels.csv";
    data.features_csv = dir / "features.csv";
    hab::io::write_metadata_csv(data.metadata_csv, data.metadata);
    hab::io::write_labels_csv(data.labels_csv, data.labels);
    hab::feat::write_feature_csv(data.features_csv, data.table);
    return data;
}

/// Small INI config for run-all over the synthetic dataset.
inline std::filesystem::path write_synthetic_config(const TempDir& dir,
                                                    const SyntheticDataset& data,
                                                    const std::string& out_dir,
                                                    std::uint64_t seed,
                                                    const std::string& roster = "rf,gbdt") {
    std::filesystem::path path = dir.file("run.ini");
    std::ofstream out(path);
    out << "[paths]\n"
        << "features = " << data.features_csv.string() << "\n"
        << "labels = " << data.labels_csv.string() << "\n"
        << "metadata = " << data.metadata_csv.string() << "\n"
        << "out_dir = " << out_dir << "\n\n"
        << "[models]\n"
        << "roster = " << roster << "\n\n"
        << "[rf]\n"
        << "n_estimators = 40\n\n"
        << "[gbdt]\n"
        << "rounds = 60\n"
        << "learning_rate = 0.1\n"
        << "num_leaves = 8\n\n"
        << "[run]\n"
        << "seed = " << seed << "\n";
    return path;
}

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
}

}  // namespace habtest
