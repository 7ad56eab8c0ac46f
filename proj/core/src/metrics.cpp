#include "hab/metrics/metrics.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace hab::metrics {

double rmse(std::span<const double> y, std::span<const double> yhat) {
    if (y.empty()) throw InputError("rmse of an empty sample is undefined");
    if (y.size() != yhat.size()) throw InputError("rmse input lengths differ");
    double ss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i]) || !std::isfinite(yhat[i]))
            throw InputError("rmse requires finite inputs");
        double d = y[i] - yhat[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(y.size()));
}

RegionScores ra_rmse(std::span<const double> y, std::span<const double> yhat,
                     std::span<const Region> regions) {
    if (y.size() != yhat.size() || y.size() != regions.size())
        throw InputError("ra_rmse input lengths differ");
    if (y.empty()) throw InputError("ra_rmse of an empty sample is undefined");
    std::array<double, 4> ss{};
    std::array<std::size_t, 4> count{};
    double total_ss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i]) || !std::isfinite(yhat[i]))
            throw InputError("ra_rmse requires finite inputs");
        double d = y[i] - yhat[i];
        auto r = static_cast<std::size_t>(regions[i]);
        ss[r] += d * d;
        ++count[r];
        total_ss += d * d;
    }
    RegionScores out;
    double sum = 0.0;
    for (std::size_t r = 0; r < 4; ++r) {
        if (count[r] == 0)
            throw InputError("region '" + std::string(region_name(kAllRegions[r])) +
                             "' has no rows; region-averaged metric is undefined");
        out.per_region[r] = std::sqrt(ss[r] / static_cast<double>(count[r]));
        sum += out.per_region[r];
    }
    out.region_mean = sum / 4.0;
    out.samples_mean = std::sqrt(total_ss / static_cast<double>(y.size()));
    return out;
}

Confusion confusion_matrix(std::span<const int> true_sev, std::span<const int> pred_sev) {
    if (true_sev.size() != pred_sev.size())
        throw InputError("confusion matrix input lengths differ");
    Confusion m{};
    for (std::size_t i = 0; i < true_sev.size(); ++i) {
        int t = true_sev[i], p = pred_sev[i];
        if (t < 1 || t > 5 || p < 1 || p > 5)
            throw InputError("severity class outside 1..5 at row " + std::to_string(i));
        ++m[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(p - 1)];
    }
    return m;
}

AccuracySummary accuracy_summary(const Confusion& confusion) {
    std::int64_t total = 0, diag = 0, severe_total = 0, severe_diag = 0;
    for (std::size_t t = 0; t < 5; ++t) {
        for (std::size_t p = 0; p < 5; ++p) {
            std::int64_t c = confusion[t][p];
            if (c < 0) throw InputError("confusion matrix entries must be non-negative");
            total += c;
            if (t == p) diag += c;
            if (t >= 3) {
                severe_total += c;
                if (t == p) severe_diag += c;
            }
        }
    }
    if (total == 0) throw InputError("confusion matrix is empty");
    AccuracySummary out;
    out.overall = static_cast<double>(diag) / static_cast<double>(total);
    if (severe_total > 0)
        out.severe = static_cast<double>(severe_diag) / static_cast<double>(severe_total);
    return out;
}

EvalReport evaluate_severity(std::span<const int> true_sev, std::span<const int> pred_sev,
                             std::span<const Region> regions) {
    EvalReport report;
    std::vector<double> y(true_sev.begin(), true_sev.end());
    std::vector<double> yhat(pred_sev.begin(), pred_sev.end());
    report.scores = ra_rmse(y, yhat, regions);
    report.confusion = confusion_matrix(true_sev, pred_sev);
    report.accuracy = accuracy_summary(report.confusion);
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json per_region;
    for (std::size_t r = 0; r < 4; ++r)
        per_region[std::string(region_name(kAllRegions[r]))] = report.scores.per_region[r];
    j["per_region"] = per_region;
    j["region_mean"] = report.scores.region_mean;
    j["samples_mean"] = report.scores.samples_mean;
    j["confusion"] = report.confusion;
    j["accuracy_overall"] = report.accuracy.overall;
    if (report.accuracy.severe.has_value())
        j["accuracy_severe"] = *report.accuracy.severe;
    else
        j["accuracy_severe"] = nullptr;
    return j.dump(2);
}

}  // namespace hab::metrics
