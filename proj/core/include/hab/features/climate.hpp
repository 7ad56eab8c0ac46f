#pragma once

#include <array>
#include <vector>

#include "hab/common.hpp"

namespace hab::feat {

inline constexpr std::size_t kClimateDays = 28;
inline constexpr std::size_t kClimateVars = 5;

/// Daily climate values for the 28 days before sampling, oldest first.
/// Day-major layout: values[day * 5 + var], variable order temperature,
/// rain, gust, snowc, hgt. NaN marks a missing cell.
struct ClimateSeries {
    std::vector<float> values;  // 140 when present
    bool present = false;
};

/// Twelve statistics in feature order: temp mean/std, temp mean/std over the
/// final week, then mean/std for rain, gust, snowc, hgt. NaN cells are
/// ignored; a statistic with empty support (or an absent record) is the
/// sentinel.
std::array<double, 12> climate_stats(const ClimateSeries& series);

}  // namespace hab::feat
