#include "doctest.h"

#include <set>

#include "hab/pipeline/run.hpp"
#include "support/fixtures.hpp"

using namespace hab;
using namespace hab::pipeline;

namespace {

/// Test double recording which uids get looked up.
class TrackingLabels final : public LabelProvider {
public:
    explicit TrackingLabels(const LabelProvider& inner) : inner_(inner) {}

    const Label* find(const std::string& uid) const override {
        accessed_.insert(uid);
        return inner_.find(uid);
    }

    const std::set<std::string>& accessed() const { return accessed_; }

private:
    const LabelProvider& inner_;
    mutable std::set<std::string> accessed_;
};

RunConfig synthetic_config(const habtest::SyntheticDataset& data,
                           const std::filesystem::path& out_dir, std::uint64_t seed) {
    RunConfig config = default_run_config();
    config.features = data.features_csv;
    config.labels = data.labels_csv;
    config.metadata = data.metadata_csv;
    config.out_dir = out_dir;
    config.seed = seed;
    // The planted labels include class 5, so the fixture disables the
    // clip-to-4 cap to make a perfect score reachable.
    config.clip_cap = 5;
    for (auto& spec : config.roster) {
        spec.rf.seed = seed;
        spec.gbdt.seed = seed;
        spec.rf.n_estimators = 30;
        spec.gbdt.rounds = 50;
        spec.gbdt.learning_rate = 0.1;
        spec.gbdt.num_leaves = 8;
    }
    return config;
}

}  // namespace

TEST_CASE("constant targets give constant OOF and test predictions") {
    habtest::TempDir dir("cv_const");
    auto data = habtest::make_synthetic_dataset(dir.path(), 40, 10, 3);
    // flatten the targets
    for (auto& label : data.labels) label.density = 49.0;  // sqrt = 7
    io::write_labels_csv(data.labels_csv, data.labels);
    LabelTable labels(data.labels);

    auto metadata = io::read_metadata_csv(data.metadata_csv);
    auto table = feat::read_feature_csv(data.features_csv);
    TrainingView view = make_training_view(table, metadata, labels);
    auto folds = kfold_split(view.train_uids, 5, 1);

    ModelSpec spec;
    spec.name = "rf";
    spec.rf.n_estimators = 4;
    CvResult cv = run_model_cv(spec, view, folds, {}, 1);
    for (const auto& uid : cv.oof.uids()) CHECK(cv.oof.value(uid) == doctest::Approx(7.0));
    for (const auto& uid : cv.test.uids()) CHECK(cv.test.value(uid) == doctest::Approx(7.0));
}

TEST_CASE("every train uid receives exactly one OOF prediction") {
    habtest::TempDir dir("cv_oof");
    auto data = habtest::make_synthetic_dataset(dir.path(), 37, 9, 5);
    LabelTable labels(data.labels);
    auto metadata = io::read_metadata_csv(data.metadata_csv);
    auto table = feat::read_feature_csv(data.features_csv);
    TrainingView view = make_training_view(table, metadata, labels);
    auto folds = kfold_split(view.train_uids, 5, 2);

    ModelSpec spec;
    spec.name = "gbdt";
    spec.gbdt.rounds = 10;
    spec.gbdt.num_leaves = 4;
    CvResult cv = run_model_cv(spec, view, folds, {}, 2);
    CHECK(cv.oof.size() == view.train_uids.size());
    for (std::size_t i = 0; i < view.train_uids.size(); ++i) {
        CHECK(cv.oof.contains(view.train_uids[i]));
        CHECK(cv.oof.fold(view.train_uids[i]) == folds.fold_of[i]);
    }
    CHECK(cv.test.size() == view.test_uids.size());
    CHECK(cv.fold_importance.size() == 5);
}

TEST_CASE("ensemble averaging") {
    PredictionSet a("a"), b("b");
    a.add("u1", 0, 100.0);
    b.add("u1", 0, 300.0);
    const PredictionSet* two[] = {&a, &b};
    PredictionSet fused = ensemble_average(two);
    CHECK(fused.value("u1") == 200.0);

    const PredictionSet* one[] = {&a};
    PredictionSet same = ensemble_average(one);
    CHECK(same.value("u1") == 100.0);

    PredictionSet c("c");
    c.add("u2", 0, 1.0);
    const PredictionSet* mismatch[] = {&a, &c};
    CHECK_THROWS_WITH_AS(ensemble_average(mismatch), doctest::Contains("u1"), InputError);
}

TEST_CASE("three-way fuse matches a manual mean") {
    SplitMix64 rng(8);
    PredictionSet rf("rf"), gbdt("gbdt"), nn("nn");
    std::vector<std::string> uids = {"x", "y", "z"};
    std::vector<double> vr, vg, vn;
    for (const auto& uid : uids) {
        vr.push_back(rng.next_unit() * 100);
        vg.push_back(rng.next_unit() * 100);
        vn.push_back(rng.next_unit() * 100);
        rf.add(uid, 0, vr.back());
        gbdt.add(uid, 0, vg.back());
        nn.add(uid, 0, vn.back());
    }
    const PredictionSet* three[] = {&rf, &gbdt, &nn};
    PredictionSet fused = ensemble_average(three);
    for (std::size_t i = 0; i < uids.size(); ++i)
        CHECK(fused.value(uids[i]) ==
              doctest::Approx((vr[i] + vg[i] + vn[i]) / 3.0).epsilon(1e-12));
}

TEST_CASE("end to end on the synthetic fixture") {
    habtest::TempDir dir("e2e");
    auto data = habtest::make_synthetic_dataset(dir.path(), 160, 40, 11);
    LabelTable inner(data.labels);
    TrackingLabels labels(inner);
    RunConfig config = synthetic_config(data, dir.file("out"), 11);

    RunArtifacts artifacts = run_end_to_end(config, labels);

    SUBCASE("noiseless signal drives the OOF region mean near zero") {
        CHECK(artifacts.report.scores.region_mean < 0.1);
    }
    SUBCASE("no test-split label is ever read") {
        std::set<std::string> train_uids;
        for (const auto& label : data.labels) train_uids.insert(label.uid);
        for (const auto& uid : labels.accessed())
            CHECK(train_uids.count(uid) == 1);
    }
    SUBCASE("artifacts exist and the gbdt subset is a subset of 0..44") {
        for (const char* name :
             {"rf_predictions.csv", "gbdt_predictions.csv", "fused_predictions.csv",
              "oof_severity.csv", "test_severity.csv", "cuts.json", "eval_report.json",
              "run_manifest.json"})
            CHECK(std::filesystem::exists(dir.file("out") / name));
        CHECK(!artifacts.selected_features.empty());
        for (auto idx : artifacts.selected_features) CHECK(idx < 45);
        // the planted signal column must survive selection
        CHECK(std::find(artifacts.selected_features.begin(),
                        artifacts.selected_features.end(), 0u) !=
              artifacts.selected_features.end());
    }
    SUBCASE("cuts were fitted on OOF predictions only (test rows fused separately)") {
        auto fused = io::read_external_predictions(dir.file("out") / "fused_predictions.csv",
                                                   "fused");
        std::size_t oof_rows = 0, test_rows = 0;
        for (const auto& uid : fused.uids())
            (fused.fold(uid) == PredictionSet::kTestFold ? test_rows : oof_rows)++;
        CHECK(oof_rows == 160);
        CHECK(test_rows == 40);
    }
}

TEST_CASE("rerunning with the same seed is byte-identical; another seed differs") {
    habtest::TempDir dir("e2e_det");
    auto data = habtest::make_synthetic_dataset(dir.path(), 80, 20, 21);
    LabelTable labels(data.labels);

    RunConfig a = synthetic_config(data, dir.file("out_a"), 21);
    RunConfig b = synthetic_config(data, dir.file("out_b"), 21);
    RunConfig c = synthetic_config(data, dir.file("out_c"), 22);
    run_end_to_end(a, labels);
    run_end_to_end(b, labels);
    run_end_to_end(c, labels);

    for (const char* name : {"rf_predictions.csv", "gbdt_predictions.csv",
                             "fused_predictions.csv", "oof_severity.csv",
                             "test_severity.csv"}) {
        auto bytes_a = habtest::read_bytes(dir.file("out_a") / name);
        CHECK(bytes_a == habtest::read_bytes(dir.file("out_b") / name));
    }
    CHECK(habtest::read_bytes(dir.file("out_a") / "rf_predictions.csv") !=
          habtest::read_bytes(dir.file("out_c") / "rf_predictions.csv"));
}

TEST_CASE("single-model roster: fused equals the model") {
    habtest::TempDir dir("e2e_rf_only");
    auto data = habtest::make_synthetic_dataset(dir.path(), 60, 10, 31);
    LabelTable labels(data.labels);
    RunConfig config = synthetic_config(data, dir.file("out"), 31);
    config.roster.resize(1);  // rf only
    RunArtifacts artifacts = run_end_to_end(config, labels);
    CHECK(artifacts.selected_features.empty());  // no gbdt leg, no selection

    auto rf = io::read_external_predictions(dir.file("out") / "rf_predictions.csv", "rf");
    auto fused =
        io::read_external_predictions(dir.file("out") / "fused_predictions.csv", "fused");
    REQUIRE(rf.size() == fused.size());
    for (const auto& uid : rf.uids()) CHECK(rf.value(uid) == fused.value(uid));
}

TEST_CASE("external prediction files join the ensemble") {
    habtest::TempDir dir("e2e_ext");
    auto data = habtest::make_synthetic_dataset(dir.path(), 40, 10, 41);
    LabelTable labels(data.labels);

    // synthesize an external leg covering all uids
    PredictionSet nn("nn");
    auto folds = kfold_split(
        [&] {
            std::vector<std::string> uids;
            for (const auto& l : data.labels) uids.push_back(l.uid);
            return uids;
        }(),
        5, 41);
    for (std::size_t i = 0; i < folds.uids.size(); ++i)
        nn.add(folds.uids[i], folds.fold_of[i], 10.0 + static_cast<double>(i));
    for (const auto& m : data.metadata)
        if (m.split == Split::Test) nn.add(m.uid, PredictionSet::kTestFold, 25.0);
    io::write_predictions_csv(dir.file("nn.csv"), nn);

    RunConfig config = synthetic_config(data, dir.file("out"), 41);
    config.roster.resize(1);  // rf + external
    config.external.emplace_back("nn", dir.file("nn.csv"));
    RunArtifacts artifacts = run_end_to_end(config, labels);
    CHECK(artifacts.model_scores.size() == 3);  // rf, nn, fused

    auto rf = io::read_external_predictions(dir.file("out") / "rf_predictions.csv", "rf");
    auto fused =
        io::read_external_predictions(dir.file("out") / "fused_predictions.csv", "fused");
    for (const auto& uid : fused.uids()) {
        double expect = (rf.value(uid) + nn.value(uid)) / 2.0;
        CHECK(fused.value(uid) == doctest::Approx(expect).epsilon(1e-12));
    }

    SUBCASE("missing uid coverage in the external file aborts") {
        PredictionSet partial("nn");
        partial.add(data.labels[0].uid, 0, 1.0);
        io::write_predictions_csv(dir.file("partial.csv"), partial);
        RunConfig bad = synthetic_config(data, dir.file("out2"), 41);
        bad.external.emplace_back("nn", dir.file("partial.csv"));
        CHECK_THROWS_AS(run_end_to_end(bad, labels), StageError);
        CHECK(!std::filesystem::exists(dir.file("out2") / "fused_predictions.csv"));
    }
}

TEST_CASE("stage failures name the stage and remove partial artifacts") {
    habtest::TempDir dir("e2e_fail");
    auto data = habtest::make_synthetic_dataset(dir.path(), 40, 10, 51);
    // break the labels: drop one train label
    std::vector<Label> partial(data.labels.begin(), data.labels.end() - 1);
    LabelTable labels(partial);
    RunConfig config = synthetic_config(data, dir.file("out"), 51);
    try {
        run_end_to_end(config, labels);
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "load");
        CHECK(std::string(e.what()).find("no label") != std::string::npos);
    }
}

TEST_CASE("missing config paths fail fast as input errors") {
    habtest::TempDir dir("e2e_cfg");
    auto data = habtest::make_synthetic_dataset(dir.path(), 40, 10, 61);
    LabelTable labels(data.labels);
    RunConfig config = synthetic_config(data, dir.file("out"), 61);
    config.labels = dir.file("nope.csv");
    CHECK_THROWS_AS(run_end_to_end(config, labels), InputError);
}

TEST_CASE("metadata/table misalignment is rejected") {
    habtest::TempDir dir("view_misalign");
    auto data = habtest::make_synthetic_dataset(dir.path(), 20, 5, 71);
    LabelTable labels(data.labels);
    auto metadata = io::read_metadata_csv(data.metadata_csv);
    auto table = feat::read_feature_csv(data.features_csv);
    std::swap(table.uids[0], table.uids[1]);
    CHECK_THROWS_AS(make_training_view(table, metadata, labels), InputError);
}

TEST_CASE("select_columns") {
    Matrix X(2, 3);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 3; ++c) X.at(r, c) = 10.0 * r + c;
    std::vector<std::size_t> cols = {2, 0};
    Matrix sub = select_columns(X, cols);
    CHECK(sub.cols == 2);
    CHECK(sub.at(0, 0) == 2.0);
    CHECK(sub.at(1, 1) == 10.0);
    std::vector<std::size_t> bad = {7};
    CHECK_THROWS_AS(select_columns(X, bad), InputError);
}
