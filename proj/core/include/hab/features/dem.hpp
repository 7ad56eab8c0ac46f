#pragma once

#include <array>

#include "hab/features/patch.hpp"

namespace hab::feat {

/// Elevation data for one sample: 32x32 geomorphology patch plus the
/// absolute altitude (meters) at the sampling point.
struct ElevationRecord {
    PatchImage dem;  // 32x32x1
    float altitude = 0.0f;
    bool present = false;
};

/// (altitude, dem mean, dem median, dem population std); sentinel quadruple
/// for an absent record, sentinel altitude when non-finite.
std::array<double, 4> dem_stats(const ElevationRecord& record);

}  // namespace hab::feat
