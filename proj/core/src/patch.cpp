#include "hab/features/patch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hab::feat {

namespace {

std::uint8_t scale_one(double v, double lo, double hi) {
    if (!(hi > lo)) return 0;
    double scaled = (v - lo) / (hi - lo) * 255.0;
    return static_cast<std::uint8_t>(std::llround(scaled));
}

}  // namespace

std::vector<std::uint8_t> scale_to_u8(std::span<const double> values, std::size_t height,
                                      std::size_t width, std::size_t channels,
                                      ScaleMode mode) {
    if (values.size() != height * width * channels)
        throw InputError("scale_to_u8: value count does not match shape");
    for (double v : values)
        if (!std::isfinite(v)) throw InputError("scale_to_u8: non-finite input");
    std::vector<std::uint8_t> out(values.size());
    if (mode == ScaleMode::Joint) {
        auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
        double lo = *lo_it, hi = *hi_it;
        for (std::size_t i = 0; i < values.size(); ++i)
            out[i] = scale_one(values[i], lo, hi);
    } else {
        for (std::size_t c = 0; c < channels; ++c) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < height * width; ++p) {
                double v = values[p * channels + c];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            for (std::size_t p = 0; p < height * width; ++p)
                out[p * channels + c] = scale_one(values[p * channels + c], lo, hi);
        }
    }
    return out;
}

PatchImage center_crop(const PatchImage& patch) {
    if (!patch.present) throw InputError("center_crop: absent patch");
    if (patch.height != 64 || patch.width != 64)
        throw InputError("center_crop: input must be 64x64, got " +
                         std::to_string(patch.height) + "x" + std::to_string(patch.width));
    PatchImage out;
    out.height = 32;
    out.width = 32;
    out.channels = patch.channels;
    out.present = true;
    out.pixels.resize(std::size_t{32} * 32 * patch.channels);
    std::size_t k = 0;
    for (std::size_t r = 16; r <= 47; ++r)
        for (std::size_t c = 16; c <= 47; ++c)
            for (std::size_t ch = 0; ch < patch.channels; ++ch)
                out.pixels[k++] = patch.at(r, c, ch);
    return out;
}

std::vector<ChannelStats> channel_stats(const PatchImage& patch) {
    std::vector<ChannelStats> out(patch.channels);
    if (!patch.present) return out;
    std::size_t n = std::size_t{patch.height} * patch.width;
    if (n == 0) return out;
    std::vector<std::uint8_t> channel(n);
    for (std::size_t c = 0; c < patch.channels; ++c) {
        for (std::size_t p = 0; p < n; ++p) channel[p] = patch.pixels[p * patch.channels + c];
        double sum = 0.0;
        for (auto v : channel) sum += v;
        double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (auto v : channel) {
            double d = static_cast<double>(v) - mean;
            ss += d * d;
        }
        std::sort(channel.begin(), channel.end());
        double median;
        if (n % 2 == 1) {
            median = channel[n / 2];
        } else {
            median = (static_cast<double>(channel[n / 2 - 1]) +
                      static_cast<double>(channel[n / 2])) /
                     2.0;
        }
        out[c] = {mean, median, std::sqrt(ss / static_cast<double>(n))};
    }
    return out;
}

double band_index(double median_a, double median_b) {
    if (median_a == kSentinel || median_b == kSentinel) return kSentinel;
    double denom = median_a + median_b;
    if (denom == 0.0) return kSentinel;
    double v = (median_a - median_b) / denom;
    if (!std::isfinite(v)) return kSentinel;
    return v;
}

PatchImage synth_mean_image(std::span<const PatchImage* const> patches) {
    const PatchImage* first = nullptr;
    for (const auto* p : patches)
        if (p != nullptr && p->present) {
            first = p;
            break;
        }
    if (first == nullptr) throw InputError("synth_mean_image: no present patches");
    std::size_t channels = first->channels;
    std::size_t pixels_per_channel = std::size_t{first->height} * first->width;
    std::vector<double> sums(channels, 0.0);
    std::size_t n_patches = 0;
    for (const auto* p : patches) {
        if (p == nullptr || !p->present) continue;
        if (p->height != first->height || p->width != first->width ||
            p->channels != first->channels)
            throw InputError("synth_mean_image: mixed patch shapes");
        for (std::size_t px = 0; px < pixels_per_channel; ++px)
            for (std::size_t c = 0; c < channels; ++c)
                sums[c] += p->pixels[px * channels + c];
        ++n_patches;
    }
    PatchImage out;
    out.height = first->height;
    out.width = first->width;
    out.channels = first->channels;
    out.present = true;
    out.pixels.resize(pixels_per_channel * channels);
    for (std::size_t c = 0; c < channels; ++c) {
        double mean = sums[c] / (static_cast<double>(n_patches) *
                                 static_cast<double>(pixels_per_channel));
        auto value = static_cast<std::uint8_t>(std::llround(mean));
        for (std::size_t px = 0; px < pixels_per_channel; ++px)
            out.pixels[px * channels + c] = value;
    }
    return out;
}

}  // namespace hab::feat
