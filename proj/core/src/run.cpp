#include "hab/pipeline/run.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "hab/io/container.hpp"
#include "hab/io/csv.hpp"

namespace hab::pipeline {

LabelTable::LabelTable(std::vector<Label> labels) : labels_(std::move(labels)) {
    index_.reserve(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (!index_.emplace(labels_[i].uid, i).second)
            throw InputError("duplicate label for uid '" + labels_[i].uid + "'");
    }
}

const Label* LabelTable::find(const std::string& uid) const {
    auto it = index_.find(uid);
    return it == index_.end() ? nullptr : &labels_[it->second];
}

Matrix select_columns(const Matrix& X, std::span<const std::size_t> cols) {
    if (cols.empty()) return X;
    Matrix out(X.rows, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        if (cols[c] >= X.cols)
            throw InputError("feature subset index " + std::to_string(cols[c]) +
                             " out of range");
    for (std::size_t r = 0; r < X.rows; ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            out.at(r, c) = X.at(r, cols[c]);
    return out;
}

TrainingView make_training_view(const feat::FeatureTable& table,
                                const std::vector<SampleMeta>& metadata,
                                const LabelProvider& labels) {
    if (table.uids.size() != metadata.size())
        throw InputError("feature table and metadata row counts differ");
    for (std::size_t i = 0; i < metadata.size(); ++i)
        if (table.uids[i] != metadata[i].uid)
            throw InputError("feature table row " + std::to_string(i) +
                             " is '" + table.uids[i] + "' but metadata has '" +
                             metadata[i].uid + "'");

    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < metadata.size(); ++i)
        (metadata[i].split == Split::Train ? train_rows : test_rows).push_back(i);

    TrainingView view;
    view.train_features = Matrix(train_rows.size(), table.features.cols);
    view.test_features = Matrix(test_rows.size(), table.features.cols);
    view.targets.reserve(train_rows.size());
    for (std::size_t k = 0; k < train_rows.size(); ++k) {
        std::size_t i = train_rows[k];
        view.train_uids.push_back(table.uids[i]);
        for (std::size_t c = 0; c < table.features.cols; ++c)
            view.train_features.at(k, c) = table.features.at(i, c);
        const Label* label = labels.find(table.uids[i]);
        if (label == nullptr)
            throw InputError("train uid '" + table.uids[i] + "' has no label");
        view.targets.push_back(target_transform(label->density));
        view.severities.push_back(label->severity);
        view.regions.push_back(label->region);
    }
    for (std::size_t k = 0; k < test_rows.size(); ++k) {
        std::size_t i = test_rows[k];
        view.test_uids.push_back(table.uids[i]);
        for (std::size_t c = 0; c < table.features.cols; ++c)
            view.test_features.at(k, c) = table.features.at(i, c);
    }
    return view;
}

CvResult run_model_cv(const ModelSpec& spec, const TrainingView& view,
                      const FoldAssignment& folds,
                      std::span<const std::size_t> feature_subset, std::uint64_t seed) {
    std::size_t n = view.train_uids.size();
    if (folds.size() != n) throw InputError("fold assignment does not match train rows");

    Matrix X_train = select_columns(view.train_features, feature_subset);
    Matrix X_test = select_columns(view.test_features, feature_subset);

    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i)
        weights[i] = region_weight(view.regions[i], spec.weights);

    std::vector<double> oof_values(n, 0.0);
    std::vector<double> test_sums(view.test_uids.size(), 0.0);
    CvResult result;
    result.oof.set_model_id(spec.name);
    result.test.set_model_id(spec.name);

    for (int fold = 0; fold < folds.k; ++fold) {
        std::vector<std::size_t> fit_rows, holdout_rows;
        for (std::size_t i = 0; i < n; ++i)
            (folds.fold_of[i] == fold ? holdout_rows : fit_rows).push_back(i);
        if (fit_rows.empty() || holdout_rows.empty())
            throw StageError("cv:" + spec.name,
                             "fold " + std::to_string(fold) + " is empty");

        Matrix X_fit(fit_rows.size(), X_train.cols);
        std::vector<double> y_fit(fit_rows.size()), w_fit(fit_rows.size());
        for (std::size_t k = 0; k < fit_rows.size(); ++k) {
            std::size_t i = fit_rows[k];
            for (std::size_t c = 0; c < X_train.cols; ++c)
                X_fit.at(k, c) = X_train.at(i, c);
            y_fit[k] = view.targets[i];
            w_fit[k] = weights[i];
        }
        Matrix X_holdout(holdout_rows.size(), X_train.cols);
        for (std::size_t k = 0; k < holdout_rows.size(); ++k)
            for (std::size_t c = 0; c < X_train.cols; ++c)
                X_holdout.at(k, c) = X_train.at(holdout_rows[k], c);

        std::uint64_t fold_seed =
            derive_seed(derive_seed(seed, fnv1a64(spec.name)), static_cast<std::uint64_t>(fold));

        std::vector<double> holdout_pred, test_pred;
        try {
            if (spec.name == "rf") {
                trees::ForestParams params = spec.rf;
                params.seed = fold_seed;
                trees::ForestModel model = trees::fit_forest(X_fit, y_fit, w_fit, params);
                holdout_pred = trees::predict(model, X_holdout);
                test_pred = X_test.rows > 0 ? trees::predict(model, X_test)
                                            : std::vector<double>{};
                result.fold_importance.push_back(trees::feature_importance(model));
            } else if (spec.name == "gbdt") {
                trees::GbdtParams params = spec.gbdt;
                params.seed = fold_seed;
                trees::GbdtModel model = trees::fit_gbdt(X_fit, y_fit, w_fit, params);
                holdout_pred = trees::predict(model, X_holdout);
                test_pred = X_test.rows > 0 ? trees::predict(model, X_test)
                                            : std::vector<double>{};
                result.fold_importance.push_back(trees::feature_importance(model));
            } else {
                throw InputError("unknown model '" + spec.name + "'");
            }
        } catch (const std::exception& e) {
            throw StageError("cv:" + spec.name,
                             "fold " + std::to_string(fold) + ": " + e.what());
        }

        for (std::size_t k = 0; k < holdout_rows.size(); ++k)
            oof_values[holdout_rows[k]] = holdout_pred[k];
        for (std::size_t k = 0; k < test_pred.size(); ++k) test_sums[k] += test_pred[k];
    }

    for (std::size_t i = 0; i < n; ++i)
        result.oof.add(view.train_uids[i], folds.fold_of[i], oof_values[i]);
    for (std::size_t k = 0; k < view.test_uids.size(); ++k)
        result.test.add(view.test_uids[k], PredictionSet::kTestFold,
                        test_sums[k] / static_cast<double>(folds.k));
    return result;
}

PredictionSet ensemble_average(std::span<const PredictionSet* const> sets) {
    if (sets.empty()) throw InputError("nothing to ensemble");
    const PredictionSet& first = *sets.front();
    for (const auto* set : sets) {
        if (set->size() != first.size())
            throw InputError("prediction sets disagree on uid coverage");
    }
    PredictionSet fused("fused");
    for (const auto& uid : first.uids()) {
        double sum = 0.0;
        for (const auto* set : sets) {
            if (!set->contains(uid))
                throw InputError("prediction set '" + set->model_id() +
                                 "' is missing uid '" + uid + "'");
            sum += set->value(uid);
        }
        fused.add(uid, first.fold(uid), sum / static_cast<double>(sets.size()));
    }
    return fused;
}

// ---------------------------------------------------------------------------
// End-to-end run.
// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json config_echo(const RunConfig& config) {
    nlohmann::ordered_json j;
    j["paths"] = {{"features", config.features.string()},
                  {"labels", config.labels.string()},
                  {"metadata", config.metadata.string()},
                  {"out_dir", config.out_dir.string()},
                  {"patches", config.patches.string()},
                  {"climate", config.climate.string()},
                  {"dem", config.dem.string()}};
    nlohmann::ordered_json roster = nlohmann::ordered_json::array();
    for (const auto& spec : config.roster) {
        nlohmann::ordered_json m;
        m["name"] = spec.name;
        m["weight_scheme"] = std::string(weight_scheme_name(spec.weights));
        if (spec.name == "rf") {
            m["n_estimators"] = spec.rf.n_estimators;
            m["min_samples_leaf"] = spec.rf.min_samples_leaf;
            m["features_per_node"] = spec.rf.features_per_node;
            m["bootstrap"] = spec.rf.bootstrap;
        } else {
            m["rounds"] = spec.gbdt.rounds;
            m["learning_rate"] = spec.gbdt.learning_rate;
            m["num_leaves"] = spec.gbdt.num_leaves;
            m["bagging_fraction"] = spec.gbdt.bagging_fraction;
            m["bagging_freq"] = spec.gbdt.bagging_freq;
            m["min_samples_leaf"] = spec.gbdt.min_samples_leaf;
            m["subsample"] = config.gbdt_subsample_alias;  // provenance only
            m["importance_threshold"] = spec.importance_threshold;
        }
        roster.push_back(m);
    }
    j["roster"] = roster;
    nlohmann::ordered_json ext = nlohmann::ordered_json::array();
    for (const auto& [name, path] : config.external)
        ext.push_back({{"name", name}, {"path", path.string()}});
    j["external"] = ext;
    j["seed"] = config.seed;
    j["folds"] = config.folds;
    j["stratify"] = config.stratify_by_severity ? "severity" : "off";
    j["imputation_mode"] = std::string(feat::impute_mode_name(config.impute));
    j["calibration"] = {{"metric", std::string(cal_metric_name(config.calibration.metric))},
                        {"max_iter", config.calibration.nelder_mead.max_iter},
                        {"xatol", config.calibration.nelder_mead.xatol},
                        {"fatol", config.calibration.nelder_mead.fatol}};
    j["clip_cap"] = config.clip_cap;
    return j;
}

std::vector<std::pair<std::string, int>> severity_rows(
    const PredictionSet& set, const calib::CutPoints& cuts, int clip_cap) {
    std::vector<std::pair<std::string, int>> rows;
    rows.reserve(set.size());
    for (const auto& uid : set.uids()) {
        int sev = calib::severity_from_cutpoints(set.value(uid), cuts);
        rows.emplace_back(uid, calib::clip_severity(sev, clip_cap));
    }
    return rows;
}

}  // namespace

RunArtifacts run_end_to_end(const RunConfig& config, const LabelProvider& labels,
                            std::ostream* log) {
    RunArtifacts artifacts;
    std::string stage = "config";
    auto note = [&](const std::string& message) {
        if (log != nullptr) *log << "[" << stage << "] " << message << '\n';
    };

    // Fail-fast validation surfaces as InputError, before anything runs or
    // any artifact is written.
    validate_run_config(config);
    {
        std::vector<std::string> seen;
        for (const auto& spec : config.roster) {
            if (std::find(seen.begin(), seen.end(), spec.name) != seen.end())
                throw InputError("duplicate model '" + spec.name + "' in roster");
            seen.push_back(spec.name);
        }
    }

    try {
        std::filesystem::create_directories(config.out_dir);
        artifacts.out_dir = config.out_dir;
        auto artifact_path = [&](const std::string& name) {
            std::filesystem::path p = config.out_dir / name;
            artifacts.files.push_back(p);
            return p;
        };

        stage = "load";
        std::vector<SampleMeta> metadata = io::read_metadata_csv(config.metadata);
        feat::FeatureTable table;
        feat::FeatureBuildStats build_stats;
        if (!config.features.empty()) {
            table = feat::read_feature_csv(config.features);
            note("feature table: " + std::to_string(table.uids.size()) + " rows");
        } else {
            stage = "featurize";
            io::PatchDataset patches;
            io::ClimateDataset climate;
            io::DemDataset dem;
            bool have_patches = !config.patches.empty();
            bool have_climate = !config.climate.empty();
            bool have_dem = !config.dem.empty();
            if (have_patches) patches = io::read_patch_container(config.patches);
            if (have_climate) climate = io::read_climate_container(config.climate);
            if (have_dem) dem = io::read_dem_container(config.dem);
            table = feat::build_feature_table(metadata, have_patches ? &patches : nullptr,
                                              have_climate ? &climate : nullptr,
                                              have_dem ? &dem : nullptr, config.impute,
                                              &build_stats);
            feat::write_feature_csv(artifact_path("features.csv"), table);
            feat::write_feature_matrix(artifact_path("features.bin"), table.features);
            note("featurized " + std::to_string(build_stats.rows) + " rows (" +
                 std::to_string(build_stats.missing_patches) + " patches missing, " +
                 std::to_string(build_stats.missing_climate) + " climate missing, " +
                 std::to_string(build_stats.missing_dem) + " dem missing)");
        }

        stage = "load";
        TrainingView view = make_training_view(table, metadata, labels);
        if (view.train_uids.empty()) throw InputError("no train rows in metadata");
        note("train rows: " + std::to_string(view.train_uids.size()) +
             ", test rows: " + std::to_string(view.test_uids.size()));

        stage = "folds";
        FoldAssignment folds;
        if (config.stratify_by_severity)
            folds = kfold_split_stratified(view.train_uids, view.severities, config.folds,
                                           config.seed);
        else
            folds = kfold_split(view.train_uids, config.folds, config.seed);

        stage = "cv";
        std::vector<PredictionSet> oof_sets, test_sets;
        std::vector<std::size_t> gbdt_subset;
        bool have_rf_importance = false;
        trees::FeatureImportance rf_importance;
        // RF first so its importance can drive the GBDT feature subset.
        std::vector<const ModelSpec*> ordered;
        for (const auto& spec : config.roster)
            if (spec.name == "rf") ordered.push_back(&spec);
        for (const auto& spec : config.roster)
            if (spec.name != "rf") ordered.push_back(&spec);

        for (const ModelSpec* spec : ordered) {
            stage = "cv:" + spec->name;
            std::span<const std::size_t> subset;
            if (spec->name == "gbdt" && have_rf_importance) {
                gbdt_subset = trees::select_features(rf_importance,
                                                     spec->importance_threshold);
                if (gbdt_subset.empty())
                    throw StageError(stage, "importance threshold selected no features");
                subset = gbdt_subset;
                artifacts.selected_features = gbdt_subset;
                note("selected " + std::to_string(gbdt_subset.size()) +
                     " features by RF importance");
            }
            CvResult cv = run_model_cv(*spec, view, folds, subset, config.seed);
            if (spec->name == "rf") {
                rf_importance = trees::average_importance(cv.fold_importance);
                have_rf_importance = true;
            }
            note(spec->name + ": OOF predictions for " + std::to_string(cv.oof.size()) +
                 " uids");
            oof_sets.push_back(std::move(cv.oof));
            test_sets.push_back(std::move(cv.test));
        }

        stage = "external";
        for (const auto& [name, path] : config.external) {
            PredictionSet set = io::read_external_predictions(path, name);
            PredictionSet oof(name), test(name);
            for (const auto& uid : set.uids()) {
                int fold = set.fold(uid);
                if (fold == PredictionSet::kTestFold)
                    test.add(uid, fold, set.value(uid));
                else
                    oof.add(uid, fold, set.value(uid));
            }
            for (const auto& uid : view.train_uids)
                if (!oof.contains(uid))
                    throw InputError("external set '" + name +
                                     "' is missing OOF prediction for uid '" + uid + "'");
            for (const auto& uid : view.test_uids)
                if (!test.contains(uid))
                    throw InputError("external set '" + name +
                                     "' is missing test prediction for uid '" + uid + "'");
            note(name + ": " + std::to_string(oof.size()) + " OOF + " +
                 std::to_string(test.size()) + " test rows");
            oof_sets.push_back(std::move(oof));
            test_sets.push_back(std::move(test));
        }

        stage = "fuse";
        std::vector<const PredictionSet*> oof_ptrs, test_ptrs;
        for (const auto& s : oof_sets) oof_ptrs.push_back(&s);
        for (const auto& s : test_sets) test_ptrs.push_back(&s);
        PredictionSet fused_oof = ensemble_average(oof_ptrs);
        PredictionSet fused_test = ensemble_average(test_ptrs);

        stage = "calibrate";
        std::vector<double> oof_values;
        oof_values.reserve(view.train_uids.size());
        for (const auto& uid : view.train_uids) oof_values.push_back(fused_oof.value(uid));
        artifacts.cuts = calib::fit_cutpoints(oof_values, view.severities, view.regions,
                                              config.calibration);
        note("cuts: [" + format_double(artifacts.cuts.cuts.values[0]) + ", " +
             format_double(artifacts.cuts.cuts.values[1]) + ", " +
             format_double(artifacts.cuts.cuts.values[2]) + ", " +
             format_double(artifacts.cuts.cuts.values[3]) +
             "], objective " + format_double(artifacts.cuts.objective));

        stage = "severity";
        auto oof_sev_rows = severity_rows(fused_oof, artifacts.cuts.cuts, config.clip_cap);
        auto test_sev_rows = severity_rows(fused_test, artifacts.cuts.cuts, config.clip_cap);

        stage = "evaluate";
        std::vector<int> pred_sev;
        pred_sev.reserve(view.train_uids.size());
        {
            std::unordered_map<std::string, int> by_uid;
            for (const auto& [uid, sev] : oof_sev_rows) by_uid[uid] = sev;
            for (const auto& uid : view.train_uids) pred_sev.push_back(by_uid.at(uid));
        }
        artifacts.report = metrics::evaluate_severity(view.severities, pred_sev, view.regions);

        // Per-leg OOF scores under the fitted cuts, for the report table.
        for (const auto& set : oof_sets) {
            std::vector<double> y(view.severities.begin(), view.severities.end());
            std::vector<double> yhat;
            yhat.reserve(view.train_uids.size());
            for (const auto& uid : view.train_uids) {
                int sev = calib::severity_from_cutpoints(set.value(uid), artifacts.cuts.cuts);
                yhat.push_back(calib::clip_severity(sev, config.clip_cap));
            }
            artifacts.model_scores.push_back(
                {set.model_id(), metrics::ra_rmse(y, yhat, view.regions)});
        }
        artifacts.model_scores.push_back({"fused", artifacts.report.scores});

        stage = "persist";
        for (const auto& set : oof_sets) {
            // One file per leg holding its OOF and test rows.
            PredictionSet merged(set.model_id());
            for (const auto& uid : set.uids()) merged.add(uid, set.fold(uid), set.value(uid));
            for (const auto& s : test_sets) {
                if (s.model_id() != set.model_id()) continue;
                for (const auto& uid : s.uids()) merged.add(uid, s.fold(uid), s.value(uid));
            }
            io::write_predictions_csv(artifact_path(set.model_id() + "_predictions.csv"),
                                      merged);
        }
        {
            PredictionSet merged("fused");
            for (const auto& uid : fused_oof.uids())
                merged.add(uid, fused_oof.fold(uid), fused_oof.value(uid));
            for (const auto& uid : fused_test.uids())
                merged.add(uid, fused_test.fold(uid), fused_test.value(uid));
            io::write_predictions_csv(artifact_path("fused_predictions.csv"), merged);
        }
        io::write_severity_csv(artifact_path("oof_severity.csv"), oof_sev_rows);
        io::write_severity_csv(artifact_path("test_severity.csv"), test_sev_rows);
        calib::write_cutpoints_json(artifact_path("cuts.json"), artifacts.cuts,
                                    config.clip_cap);
        {
            std::filesystem::path p = artifact_path("eval_report.json");
            std::ofstream out(p, std::ios::trunc);
            if (!out) throw InputError("cannot open " + p.string() + " for writing");
            out << metrics::report_to_json(artifacts.report) << '\n';
        }

        stage = "manifest";
        nlohmann::ordered_json manifest;
        manifest["seed"] = config.seed;
        manifest["config"] = config_echo(config);
        if (artifacts.selected_features.empty()) {
            manifest["selected_features"] = nullptr;
        } else {
            std::vector<std::string> names;
            for (auto idx : artifacts.selected_features)
                names.emplace_back(feat::feature_names()[idx]);
            manifest["selected_features"] = names;
        }
        nlohmann::ordered_json hashes;
        for (const auto& file : artifacts.files)
            hashes[file.filename().string()] = hash_file(file.string());
        manifest["artifacts"] = hashes;
        manifest["meta"] = config.meta;
        {
            std::filesystem::path p = artifact_path("run_manifest.json");
            std::ofstream out(p, std::ios::trunc);
            if (!out) throw InputError("cannot open " + p.string() + " for writing");
            out << manifest.dump(2) << '\n';
        }
        return artifacts;
    } catch (const StageError&) {
        for (const auto& file : artifacts.files) {
            std::error_code ec;
            std::filesystem::remove(file, ec);
        }
        throw;
    } catch (const std::exception& e) {
        for (const auto& file : artifacts.files) {
            std::error_code ec;
            std::filesystem::remove(file, ec);
        }
        throw StageError(stage, e.what());
    }
}

}  // namespace hab::pipeline
