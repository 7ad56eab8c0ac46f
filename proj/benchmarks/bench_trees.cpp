#include <benchmark/benchmark.h>

#include "hab/trees/forest.hpp"
#include "hab/trees/gbdt.hpp"

using namespace hab;

namespace {

Matrix make_features(std::size_t n, std::size_t d, std::uint64_t seed) {
    Matrix X(n, d);
    SplitMix64 rng(seed);
    for (auto& v : X.values) v = rng.next_unit() * 100.0;
    return X;
}

std::vector<double> make_targets(const Matrix& X) {
    std::vector<double> y(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i)
        y[i] = 2.0 * X.at(i, 0) + X.at(i, 1) * X.at(i, 1) * 0.01;
    return y;
}

}  // namespace

static void BM_FitTree(benchmark::State& state) {
    std::size_t n = static_cast<std::size_t>(state.range(0));
    Matrix X = make_features(n, 45, 1);
    std::vector<double> y = make_targets(X);
    std::vector<double> w(n, 1.0);
    trees::TreeParams params;
    params.max_leaves = 20;
    for (auto _ : state) {
        trees::Tree tree = trees::fit_tree(X, y, w, params);
        benchmark::DoNotOptimize(tree);
    }
}
BENCHMARK(BM_FitTree)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

static void BM_FitForest(benchmark::State& state) {
    Matrix X = make_features(1000, 45, 2);
    std::vector<double> y = make_targets(X);
    std::vector<double> w(X.rows, 1.0);
    trees::ForestParams params;
    params.n_estimators = static_cast<std::size_t>(state.range(0));
    params.seed = 3;
    for (auto _ : state) {
        trees::ForestModel model = trees::fit_forest(X, y, w, params);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_FitForest)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_FitGbdt(benchmark::State& state) {
    Matrix X = make_features(1000, 19, 4);
    std::vector<double> y = make_targets(X);
    std::vector<double> w(X.rows, 1.0);
    trees::GbdtParams params;
    params.rounds = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        trees::GbdtModel model = trees::fit_gbdt(X, y, w, params);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_FitGbdt)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_ForestPredict(benchmark::State& state) {
    Matrix X = make_features(2000, 45, 5);
    std::vector<double> y = make_targets(X);
    std::vector<double> w(X.rows, 1.0);
    trees::ForestModel model = trees::fit_forest(X, y, w, {.n_estimators = 50, .seed = 6});
    for (auto _ : state) {
        auto pred = trees::predict(model, X);
        benchmark::DoNotOptimize(pred);
    }
}
BENCHMARK(BM_ForestPredict)->Unit(benchmark::kMillisecond);
