#include <benchmark/benchmark.h>

#include "hab/calibrate/cutpoints.hpp"

using namespace hab;

static void BM_NelderMeadRosenbrock(benchmark::State& state) {
    auto rosenbrock = [](std::span<const double> x) {
        double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    for (auto _ : state) {
        auto res = calib::nelder_mead(rosenbrock, std::vector<double>{-1.2, 1.0});
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(BM_NelderMeadRosenbrock);

static void BM_FitCutpoints(benchmark::State& state) {
    std::size_t n = static_cast<std::size_t>(state.range(0));
    SplitMix64 rng(1);
    std::vector<double> pred(n);
    std::vector<int> sev(n);
    std::vector<Region> regions(n);
    for (std::size_t i = 0; i < n; ++i) {
        pred[i] = rng.next_unit() * 4000.0;
        int cls = 1;
        for (double c : calib::kDefaultCuts)
            if (c <= pred[i]) ++cls;
        sev[i] = cls;
        regions[i] = kAllRegions[i % 4];
    }
    for (auto _ : state) {
        auto result = calib::fit_cutpoints(pred, sev, regions);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_FitCutpoints)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_SeverityMapping(benchmark::State& state) {
    calib::CutPoints cuts = calib::CutPoints::checked(calib::kDefaultCuts);
    SplitMix64 rng(2);
    std::vector<double> pred(100000);
    for (auto& p : pred) p = rng.next_unit() * 4000.0;
    for (auto _ : state) {
        long sum = 0;
        for (double p : pred) sum += calib::severity_from_cutpoints(p, cuts);
        benchmark::DoNotOptimize(sum);
    }
}
BENCHMARK(BM_SeverityMapping)->Unit(benchmark::kMillisecond);
