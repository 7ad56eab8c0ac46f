#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "hab/types.hpp"

namespace hab::metrics {

/// sqrt(mean((y - yhat)^2)); errors on empty or mismatched input.
double rmse(std::span<const double> y, std::span<const double> yhat);

struct RegionScores {
    std::array<double, 4> per_region{};  // indexed by Region enum order
    double region_mean = 0.0;            // unweighted mean of the four
    double samples_mean = 0.0;           // plain RMSE over all rows
};

/// RMSE per region, averaged; every region must have at least one row.
RegionScores ra_rmse(std::span<const double> y, std::span<const double> yhat,
                     std::span<const Region> regions);

using Confusion = std::array<std::array<std::int64_t, 5>, 5>;  // [true-1][pred-1]

Confusion confusion_matrix(std::span<const int> true_sev, std::span<const int> pred_sev);

struct AccuracySummary {
    double overall = 0.0;
    std::optional<double> severe;  // absent when no rows have true severity >= 4
};

/// overall = trace / total; severe = diagonal mass of rows 4..5 over their
/// row totals.
AccuracySummary accuracy_summary(const Confusion& confusion);

struct EvalReport {
    RegionScores scores;
    Confusion confusion{};
    AccuracySummary accuracy;
};

/// Full severity-level evaluation: region RMSE on the class values plus the
/// confusion matrix and accuracy summaries.
EvalReport evaluate_severity(std::span<const int> true_sev, std::span<const int> pred_sev,
                             std::span<const Region> regions);

/// JSON document with keys per_region, region_mean, samples_mean, confusion,
/// accuracy_overall, accuracy_severe.
std::string report_to_json(const EvalReport& report);

}  // namespace hab::metrics
