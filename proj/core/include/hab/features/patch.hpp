#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hab/common.hpp"

namespace hab::feat {

/// Raster patch around a sample point, row-major, channel-last. Shape
/// metadata is kept even when the imagery is absent.
struct PatchImage {
    std::uint16_t height = 0;
    std::uint16_t width = 0;
    std::uint16_t channels = 0;
    std::vector<std::uint8_t> pixels;
    bool present = false;

    std::uint8_t at(std::size_t row, std::size_t col, std::size_t ch) const {
        return pixels[(row * width + col) * channels + ch];
    }
};

enum class ScaleMode { Joint, PerChannel };

/// Min-max scales raw reflectances to u8: round((v - min) / (max - min) * 255),
/// half away from zero; a degenerate range maps to all zeros. Joint mode uses
/// one min/max across all pixels and channels of the image.
std::vector<std::uint8_t> scale_to_u8(std::span<const double> values, std::size_t height,
                                      std::size_t width, std::size_t channels,
                                      ScaleMode mode = ScaleMode::Joint);

/// 64x64 -> 32x32, keeping rows and columns 16..47; channels unchanged.
PatchImage center_crop(const PatchImage& patch);

struct ChannelStats {
    double mean = kSentinel;
    double median = kSentinel;
    double stddev = kSentinel;
};

/// Per-channel mean, median (midpoint of the central order statistics) and
/// population standard deviation. Absent patch -> all sentinel.
std::vector<ChannelStats> channel_stats(const PatchImage& patch);

/// (a - b) / (a + b); sentinel when the denominator is zero or either median
/// is itself the sentinel.
double band_index(double median_a, double median_b);

/// Constant image holding each channel's rounded mean over the present
/// patches; used to stand in for absent imagery. InputError when no patch is
/// present.
PatchImage synth_mean_image(std::span<const PatchImage* const> patches);

}  // namespace hab::feat
