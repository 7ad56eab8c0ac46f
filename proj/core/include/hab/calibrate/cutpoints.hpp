#pragma once

#include <array>
#include <filesystem>

#include "hab/calibrate/nelder_mead.hpp"
#include "hab/metrics/metrics.hpp"
#include "hab/types.hpp"

namespace hab::calib {

/// Four strictly increasing positive thresholds on the sqrt-density axis
/// separating severity classes 1..5.
struct CutPoints {
    std::array<double, 4> values;

    /// InputError unless strictly increasing and positive.
    static CutPoints checked(const std::array<double, 4>& values);
};

/// Reference thresholds used in production.
inline constexpr std::array<double, 4> kDefaultCuts = {180.0, 440.0, 979.0, 2926.0};

/// Class = 1 + number of cut points <= pred (lower-inclusive intervals).
int severity_from_cutpoints(double pred, const CutPoints& cuts);

/// min(severity, cap); cap defaults to 4.
int clip_severity(int severity, int cap = 4);

enum class CalMetric { RaRmse, Rmse };

CalMetric parse_cal_metric(std::string_view text);
std::string_view cal_metric_name(CalMetric metric);

struct CalibrationOptions {
    CalMetric metric = CalMetric::RaRmse;
    NelderMeadOptions nelder_mead;
    /// Evaluated alongside the quantile start (as a simplex seed vertex), so
    /// the fit can never end up worse than these.
    std::vector<std::array<double, 4>> seed_cuts = {kDefaultCuts};
};

struct CalibrationResult {
    CutPoints cuts;
    double objective = 0.0;
    CalMetric metric = CalMetric::RaRmse;
};

/// Minimizes metric(true_sev, classify(oof_pred, sort(c))) over cut vectors c
/// with Nelder-Mead. Candidates are sorted before evaluation; candidates
/// with duplicate coordinates after sorting, a non-positive smallest cut, or
/// non-finite entries score the 1e6 penalty. The start point is the set of
/// empirical quantiles of oof_pred at the cumulative true-class frequencies.
CalibrationResult fit_cutpoints(std::span<const double> oof_pred,
                                std::span<const int> true_sev,
                                std::span<const Region> regions,
                                const CalibrationOptions& options = {});

/// {"cuts": [...], "objective": v, "metric": name, "clip_cap": k}
void write_cutpoints_json(const std::filesystem::path& path,
                          const CalibrationResult& result, int clip_cap);
std::pair<CalibrationResult, int> read_cutpoints_json(const std::filesystem::path& path);

}  // namespace hab::calib
