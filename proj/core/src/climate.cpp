#include "hab/features/climate.hpp"

#include <cmath>

namespace hab::feat {

namespace {

// Mean and population std over the non-NaN cells of one variable column,
// restricted to days [first_day, 28).
std::pair<double, double> column_stats(const std::vector<float>& values, std::size_t var,
                                       std::size_t first_day) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t day = first_day; day < kClimateDays; ++day) {
        float v = values[day * kClimateVars + var];
        if (std::isnan(v)) continue;
        sum += v;
        ++n;
    }
    if (n == 0) return {kSentinel, kSentinel};
    double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t day = first_day; day < kClimateDays; ++day) {
        float v = values[day * kClimateVars + var];
        if (std::isnan(v)) continue;
        double d = static_cast<double>(v) - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / static_cast<double>(n))};
}

}  // namespace

std::array<double, 12> climate_stats(const ClimateSeries& series) {
    std::array<double, 12> out;
    out.fill(kSentinel);
    if (!series.present) return out;
    if (series.values.size() != kClimateDays * kClimateVars)
        throw InputError("climate series must hold 140 values");

    auto [temp_mean, temp_std] = column_stats(series.values, 0, 0);
    // "fw" statistics cover the final week only (days 21..27, the 7 entries
    // closest to the sampling date).
    auto [temp_mean_fw, temp_std_fw] = column_stats(series.values, 0, kClimateDays - 7);
    out[0] = temp_mean;
    out[1] = temp_std;
    out[2] = temp_mean_fw;
    out[3] = temp_std_fw;
    for (std::size_t var = 1; var < kClimateVars; ++var) {
        auto [mean, stddev] = column_stats(series.values, var, 0);
        out[2 + var * 2] = mean;
        out[3 + var * 2] = stddev;
    }
    return out;
}

}  // namespace hab::feat
