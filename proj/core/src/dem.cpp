#include "hab/features/dem.hpp"

#include <cmath>

namespace hab::feat {

std::array<double, 4> dem_stats(const ElevationRecord& record) {
    std::array<double, 4> out = {kSentinel, kSentinel, kSentinel, kSentinel};
    if (!record.present) return out;
    if (std::isfinite(record.altitude)) out[0] = record.altitude;
    auto stats = channel_stats(record.dem);
    if (!stats.empty()) {
        out[1] = stats[0].mean;
        out[2] = stats[0].median;
        out[3] = stats[0].stddev;
    }
    return out;
}

}  // namespace hab::feat
