#include "doctest.h"

#include "hab/io/container.hpp"
#include "hab/trees/importance.hpp"
#include "hab/trees/model_io.hpp"
#include "support/fixtures.hpp"

using namespace hab;
using namespace hab::trees;

TEST_CASE("forest models survive persistence with identical predictions") {
    habtest::TempDir dir("habm_forest");
    Matrix X(40, 4);
    SplitMix64 rng(1);
    for (auto& v : X.values) v = rng.next_unit() * 10.0;
    std::vector<double> y(40), w(40, 1.0);
    for (auto& v : y) v = rng.next_unit() * 5.0;
    ForestModel model = fit_forest(X, y, w, {.n_estimators = 6, .seed = 77});
    save_model(dir.file("m.habm"), model);
    AnyModel loaded = load_model(dir.file("m.habm"));
    REQUIRE(std::holds_alternative<ForestModel>(loaded));
    const auto& back = std::get<ForestModel>(loaded);
    CHECK(back.params.seed == 77);
    CHECK(back.params.n_estimators == 6);
    CHECK(predict(back, X) == predict(model, X));  // bitwise

    // round-trips are byte-identical
    save_model(dir.file("m2.habm"), back);
    CHECK(habtest::read_bytes(dir.file("m.habm")) == habtest::read_bytes(dir.file("m2.habm")));
}

TEST_CASE("gbdt models survive persistence, importance included") {
    habtest::TempDir dir("habm_gbdt");
    Matrix X(30, 3);
    SplitMix64 rng(2);
    for (auto& v : X.values) v = rng.next_unit();
    std::vector<double> y(30), w(30, 1.0);
    for (std::size_t i = 0; i < 30; ++i) y[i] = 2.0 * X.at(i, 0);
    GbdtParams params;
    params.rounds = 12;
    params.num_leaves = 4;
    params.seed = 5;
    GbdtModel model = fit_gbdt(X, y, w, params);
    save_model(dir.file("g.habm"), model);
    AnyModel loaded = load_model(dir.file("g.habm"));
    REQUIRE(std::holds_alternative<GbdtModel>(loaded));
    const auto& back = std::get<GbdtModel>(loaded);
    CHECK(back.base_score == model.base_score);
    CHECK(back.params.learning_rate == params.learning_rate);
    CHECK(predict(back, X) == predict(model, X));

    // split gains ride along in the internal-node value slot
    auto imp_before = feature_importance(model);
    auto imp_after = feature_importance(back);
    CHECK(imp_before == imp_after);

    save_model(dir.file("g2.habm"), back);
    CHECK(habtest::read_bytes(dir.file("g.habm")) == habtest::read_bytes(dir.file("g2.habm")));
}

TEST_CASE("model loader rejects malformed files") {
    habtest::TempDir dir("habm_bad");
    Matrix X(4, 1);
    for (int i = 0; i < 4; ++i) X.at(i, 0) = i;
    std::vector<double> y = {0, 1, 2, 3}, w(4, 1.0);
    ForestModel model = fit_forest(X, y, w, {.n_estimators = 1, .seed = 1});
    save_model(dir.file("ok.habm"), model);
    auto bytes = habtest::read_bytes(dir.file("ok.habm"));

    SUBCASE("magic") {
        bytes[0] = 'Z';
        io::write_file_bytes(dir.file("bad.habm"), bytes);
        CHECK_THROWS_AS(load_model(dir.file("bad.habm")), ContainerError);
    }
    SUBCASE("version") {
        bytes[4] = 2;
        io::write_file_bytes(dir.file("bad.habm"), bytes);
        CHECK_THROWS_AS(load_model(dir.file("bad.habm")), ContainerError);
    }
    SUBCASE("kind") {
        bytes[6] = 9;
        io::write_file_bytes(dir.file("bad.habm"), bytes);
        CHECK_THROWS_AS(load_model(dir.file("bad.habm")), ContainerError);
    }
    SUBCASE("truncation") {
        bytes.resize(bytes.size() / 2);
        io::write_file_bytes(dir.file("bad.habm"), bytes);
        CHECK_THROWS_AS(load_model(dir.file("bad.habm")), ContainerError);
    }
    SUBCASE("trailing garbage") {
        bytes.push_back(1);
        io::write_file_bytes(dir.file("bad.habm"), bytes);
        CHECK_THROWS_AS(load_model(dir.file("bad.habm")), ContainerError);
    }
}

TEST_CASE("randomized model round trips are byte-identical") {
    habtest::TempDir dir("habm_prop");
    SplitMix64 rng(31337);
    for (int iter = 0; iter < 30; ++iter) {
        std::size_t n = 5 + rng.bounded(40);
        std::size_t d = 1 + rng.bounded(4);
        Matrix X(n, d);
        for (auto& v : X.values) v = rng.next_unit() * 4.0;
        std::vector<double> y(n), w(n, 1.0);
        for (auto& v : y) v = rng.next_unit() * 10.0;
        auto p = dir.file("r.habm");
        if (rng.bounded(2) == 0) {
            ForestModel m = fit_forest(
                X, y, w, {.n_estimators = 1 + rng.bounded(4), .seed = rng.next()});
            save_model(p, m);
        } else {
            GbdtParams params;
            params.rounds = rng.bounded(6);
            params.num_leaves = 1 + rng.bounded(6);
            params.seed = rng.next();
            save_model(p, fit_gbdt(X, y, w, params));
        }
        auto first = habtest::read_bytes(p);
        AnyModel loaded = load_model(p);
        std::visit([&](const auto& m) { save_model(p, m); }, loaded);
        CHECK(habtest::read_bytes(p) == first);
    }
}
