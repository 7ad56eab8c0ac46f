#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hab/calibrate/cutpoints.hpp"
#include "hab/features/table.hpp"
#include "hab/trees/forest.hpp"
#include "hab/trees/gbdt.hpp"
#include "hab/types.hpp"

namespace hab::pipeline {

struct ModelSpec {
    std::string name;  // "rf" or "gbdt"
    WeightScheme weights = WeightScheme::Rf;
    trees::ForestParams rf;
    trees::GbdtParams gbdt;
    double importance_threshold = 0.005;  // gbdt feature selection
};

/// Everything a run needs; parsed from an INI-style config file (see the
/// repository README for the key reference).
struct RunConfig {
    std::filesystem::path features;  // prebuilt table; empty = featurize first
    std::filesystem::path labels;
    std::filesystem::path metadata;
    std::filesystem::path out_dir;
    std::filesystem::path patches;  // containers, used when features is empty
    std::filesystem::path climate;
    std::filesystem::path dem;

    std::vector<ModelSpec> roster;
    std::vector<std::pair<std::string, std::filesystem::path>> external;

    std::uint64_t seed = 1;
    int folds = 5;
    bool stratify_by_severity = false;
    feat::ImputeMode impute = feat::ImputeMode::Off;

    calib::CalibrationOptions calibration;
    int clip_cap = 4;
    double gbdt_subsample_alias = 0.8;  // provenance only, not consumed

    std::map<std::string, std::string> meta;  // free-form manifest entries
};

RunConfig default_run_config();

/// Parses the INI file; unknown sections or keys are errors.
RunConfig parse_run_config(const std::filesystem::path& path);

/// Fail-fast validation: non-empty roster, every referenced input path
/// exists. Throws InputError.
void validate_run_config(const RunConfig& config);

}  // namespace hab::pipeline
