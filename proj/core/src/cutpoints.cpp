#include "hab/calibrate/cutpoints.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace hab::calib {

namespace {

constexpr double kPenalty = 1e6;

int classify_sorted(double pred, const std::array<double, 4>& cuts) {
    int cls = 1;
    for (double c : cuts)
        if (c <= pred) ++cls;
    return cls;
}

/// Linear-interpolation quantile of already-sorted values.
double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw InputError("quantile of empty data");
    q = std::clamp(q, 0.0, 1.0);
    double pos = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

void force_strictly_increasing(std::array<double, 4>& cuts) {
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        if (cuts[i] <= cuts[i - 1])
            cuts[i] = cuts[i - 1] + std::max(1e-9, std::abs(cuts[i - 1]) * 1e-9);
    }
}

}  // namespace

CutPoints CutPoints::checked(const std::array<double, 4>& values) {
    for (double v : values)
        if (!std::isfinite(v) || v <= 0.0)
            throw InputError("cut points must be positive and finite");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1]))
            throw InputError("cut points must be strictly increasing");
    return CutPoints{values};
}

int severity_from_cutpoints(double pred, const CutPoints& cuts) {
    if (!std::isfinite(pred)) throw InputError("prediction must be finite");
    return classify_sorted(pred, cuts.values);
}

int clip_severity(int severity, int cap) {
    if (severity < 1 || severity > 5) throw InputError("severity outside 1..5");
    return std::min(severity, cap);
}

CalMetric parse_cal_metric(std::string_view text) {
    if (text == "ra_rmse") return CalMetric::RaRmse;
    if (text == "rmse") return CalMetric::Rmse;
    throw InputError("unknown calibration metric '" + std::string(text) + "'");
}

std::string_view cal_metric_name(CalMetric metric) {
    return metric == CalMetric::RaRmse ? "ra_rmse" : "rmse";
}

CalibrationResult fit_cutpoints(std::span<const double> oof_pred,
                                std::span<const int> true_sev,
                                std::span<const Region> regions,
                                const CalibrationOptions& options) {
    std::size_t n = oof_pred.size();
    if (n < 5) throw InputError("cut-point fitting needs at least 5 rows");
    if (true_sev.size() != n || regions.size() != n)
        throw InputError("fit_cutpoints input lengths differ");
    for (double p : oof_pred)
        if (!std::isfinite(p)) throw InputError("non-finite OOF prediction");
    for (int s : true_sev)
        if (s < 1 || s > 5) throw InputError("true severity outside 1..5");

    bool degenerate = std::all_of(oof_pred.begin(), oof_pred.end(),
                                  [&](double v) { return v == oof_pred[0]; });
    if (degenerate)
        throw InputError("OOF predictions are all identical; cuts are unidentifiable");

    if (options.metric == CalMetric::RaRmse) {
        std::array<std::size_t, 4> count{};
        for (Region r : regions) ++count[static_cast<std::size_t>(r)];
        for (std::size_t r = 0; r < 4; ++r)
            if (count[r] == 0)
                throw InputError("region '" +
                                 std::string(region_name(kAllRegions[r])) +
                                 "' has no rows; cannot calibrate on the "
                                 "region-averaged metric");
    }

    std::vector<double> y(true_sev.begin(), true_sev.end());
    std::vector<double> yhat(n);
    auto objective = [&](std::span<const double> c) -> double {
        std::array<double, 4> cuts = {c[0], c[1], c[2], c[3]};
        for (double v : cuts)
            if (!std::isfinite(v)) return kPenalty;
        std::sort(cuts.begin(), cuts.end());
        if (!(cuts[0] > 0.0)) return kPenalty;
        for (std::size_t i = 1; i < cuts.size(); ++i)
            if (cuts[i] == cuts[i - 1]) return kPenalty;
        for (std::size_t i = 0; i < n; ++i)
            yhat[i] = classify_sorted(oof_pred[i], cuts);
        if (options.metric == CalMetric::RaRmse)
            return metrics::ra_rmse(y, yhat, regions).region_mean;
        return metrics::rmse(y, yhat);
    };

    // Start at the quantiles of the predictions at cumulative class
    // frequencies, nudged strictly increasing.
    std::vector<double> sorted_pred(oof_pred.begin(), oof_pred.end());
    std::sort(sorted_pred.begin(), sorted_pred.end());
    std::array<std::size_t, 5> class_count{};
    for (int s : true_sev) ++class_count[static_cast<std::size_t>(s - 1)];
    std::array<double, 4> start;
    std::size_t cum = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        cum += class_count[k];
        start[k] = quantile_sorted(sorted_pred, static_cast<double>(cum) /
                                                    static_cast<double>(n));
    }
    force_strictly_increasing(start);

    NelderMeadOptions nm = options.nelder_mead;
    for (const auto& seed : options.seed_cuts)
        nm.seed_points.emplace_back(seed.begin(), seed.end());

    NelderMeadResult res = nelder_mead(objective, start, nm);

    std::array<double, 4> fitted = {res.x[0], res.x[1], res.x[2], res.x[3]};
    std::sort(fitted.begin(), fitted.end());
    force_strictly_increasing(fitted);

    CalibrationResult out;
    out.cuts = CutPoints::checked(fitted);
    out.objective = res.fx;
    out.metric = options.metric;
    return out;
}

void write_cutpoints_json(const std::filesystem::path& path,
                          const CalibrationResult& result, int clip_cap) {
    nlohmann::ordered_json j;
    j["cuts"] = result.cuts.values;
    j["objective"] = result.objective;
    j["metric"] = cal_metric_name(result.metric);
    j["clip_cap"] = clip_cap;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

std::pair<CalibrationResult, int> read_cutpoints_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    try {
        CalibrationResult result;
        std::array<double, 4> cuts = j.at("cuts");
        result.cuts = CutPoints::checked(cuts);
        result.objective = j.at("objective");
        result.metric = parse_cal_metric(j.at("metric").get<std::string>());
        int clip_cap = j.at("clip_cap");
        return {result, clip_cap};
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

}  // namespace hab::calib
