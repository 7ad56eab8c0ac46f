#include <benchmark/benchmark.h>

#include "hab/features/table.hpp"

using namespace hab;

namespace {

feat::PatchImage random_patch(std::uint16_t side, std::uint16_t channels,
                              std::uint64_t seed) {
    feat::PatchImage p;
    p.height = p.width = side;
    p.channels = channels;
    p.present = true;
    p.pixels.resize(std::size_t{side} * side * channels);
    SplitMix64 rng(seed);
    for (auto& px : p.pixels) px = static_cast<std::uint8_t>(rng.bounded(256));
    return p;
}

}  // namespace

static void BM_ChannelStats(benchmark::State& state) {
    feat::PatchImage p = random_patch(32, 7, 1);
    for (auto _ : state) {
        auto stats = feat::channel_stats(p);
        benchmark::DoNotOptimize(stats);
    }
}
BENCHMARK(BM_ChannelStats);

static void BM_CenterCrop(benchmark::State& state) {
    feat::PatchImage p = random_patch(64, 7, 2);
    for (auto _ : state) {
        auto cropped = feat::center_crop(p);
        benchmark::DoNotOptimize(cropped);
    }
}
BENCHMARK(BM_CenterCrop);

static void BM_ScaleToU8(benchmark::State& state) {
    SplitMix64 rng(3);
    std::vector<double> raw(std::size_t{64} * 64 * 7);
    for (auto& v : raw) v = rng.next_unit() * 10000.0;
    for (auto _ : state) {
        auto scaled = feat::scale_to_u8(raw, 64, 64, 7);
        benchmark::DoNotOptimize(scaled);
    }
}
BENCHMARK(BM_ScaleToU8);

static void BM_AssembleRow(benchmark::State& state) {
    SampleMeta meta{"u", 42.0, -90.0, {2021, 7, 3}, Split::Train};
    feat::PatchImage patch = random_patch(32, 7, 4);
    feat::ClimateSeries climate;
    climate.present = true;
    climate.values.assign(140, 5.0f);
    feat::ElevationRecord elev;
    elev.present = true;
    elev.altitude = 200.0f;
    elev.dem = random_patch(32, 1, 5);
    for (auto _ : state) {
        auto row = feat::assemble_row(meta, &patch, &climate, &elev, nullptr, false);
        benchmark::DoNotOptimize(row);
    }
}
BENCHMARK(BM_AssembleRow);
