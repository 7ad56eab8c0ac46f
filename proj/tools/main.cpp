// habfuse: multi-source severity pipeline CLI.
//
// Exit codes: 0 success, 2 input/validation error, 3 runtime/stage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "hab/calibrate/cutpoints.hpp"
#include "hab/features/table.hpp"
#include "hab/io/container.hpp"
#include "hab/io/csv.hpp"
#include "hab/metrics/metrics.hpp"
#include "hab/pipeline/run.hpp"
#include "hab/trees/model_io.hpp"

namespace {

using hab::InputError;
using hab::StageError;

struct FeaturizeArgs {
    std::string metadata, patches, climate, dem, out;
    std::string impute = "off";
};

int cmd_featurize(const FeaturizeArgs& args) {
    auto metadata = hab::io::read_metadata_csv(args.metadata);

    std::optional<hab::io::PatchDataset> patches;
    std::optional<hab::io::ClimateDataset> climate;
    std::optional<hab::io::DemDataset> dem;
    if (!args.patches.empty())
        patches = hab::io::read_patch_container(args.patches);
    else
        std::cerr << "warning: no patch container given, channel columns will be -999\n";
    if (!args.climate.empty())
        climate = hab::io::read_climate_container(args.climate);
    else
        std::cerr << "warning: no climate container given, climate columns will be -999\n";
    if (!args.dem.empty())
        dem = hab::io::read_dem_container(args.dem);
    else
        std::cerr << "warning: no dem container given, elevation columns will be -999\n";

    hab::feat::ImputeMode impute = hab::feat::parse_impute_mode(args.impute);
    hab::feat::FeatureBuildStats stats;
    hab::feat::FeatureTable table = hab::feat::build_feature_table(
        metadata, patches ? &*patches : nullptr, climate ? &*climate : nullptr,
        dem ? &*dem : nullptr, impute, &stats);

    std::filesystem::path csv_path = args.out + ".csv";
    std::filesystem::path bin_path = args.out + ".bin";
    std::filesystem::path manifest_path = args.out + ".manifest.json";
    hab::feat::write_feature_csv(csv_path, table);
    hab::feat::write_feature_matrix(bin_path, table.features);

    nlohmann::ordered_json manifest;
    manifest["rows"] = stats.rows;
    manifest["missing"] = {{"patches", stats.missing_patches},
                           {"climate", stats.missing_climate},
                           {"dem", stats.missing_dem}};
    manifest["imputed_patches"] = stats.imputed_patches;
    manifest["imputation_mode"] = std::string(hab::feat::impute_mode_name(impute));
    manifest["inputs"] = {{"metadata", args.metadata},
                          {"patches", args.patches},
                          {"climate", args.climate},
                          {"dem", args.dem}};
    manifest["artifacts"] = {
        {csv_path.filename().string(), hab::hash_file(csv_path.string())},
        {bin_path.filename().string(), hab::hash_file(bin_path.string())}};
    std::ofstream out(manifest_path, std::ios::trunc);
    if (!out) throw InputError("cannot open " + manifest_path.string() + " for writing");
    out << manifest.dump(2) << '\n';

    std::cout << "rows: " << stats.rows << "\n"
              << "missing patches: " << stats.missing_patches << "\n"
              << "missing climate: " << stats.missing_climate << "\n"
              << "missing dem: " << stats.missing_dem << "\n"
              << "imputed patches: " << stats.imputed_patches << "\n"
              << "wrote " << csv_path.string() << ", " << bin_path.string() << ", "
              << manifest_path.string() << "\n";
    return 0;
}

struct TrainArgs {
    std::string features, labels, metadata, model = "rf", out, weights;
    std::string feature_subset;
    std::uint64_t seed = 1;
    std::size_t n_estimators = 300;
    std::size_t rounds = 600;
};

std::vector<std::size_t> parse_feature_subset(const std::string& text) {
    std::vector<std::size_t> subset;
    if (text.empty()) return subset;
    for (const auto& token : hab::io::split_csv_line(text)) {
        bool numeric = !token.empty() &&
                       token.find_first_not_of("0123456789") == std::string::npos;
        if (numeric) {
            subset.push_back(static_cast<std::size_t>(std::stoul(token)));
            continue;
        }
        const auto& names = hab::feat::feature_names();
        auto it = std::find(names.begin(), names.end(), token);
        if (it == names.end())
            throw InputError("unknown feature '" + token + "' in --feature-subset");
        subset.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    return subset;
}

int cmd_train(const TrainArgs& args) {
    auto metadata = hab::io::read_metadata_csv(args.metadata);
    auto table = hab::feat::read_feature_csv(args.features);
    hab::pipeline::LabelTable labels(hab::io::read_labels_csv(args.labels));
    auto view = hab::pipeline::make_training_view(table, metadata, labels);
    if (view.train_uids.empty()) throw InputError("no train rows in metadata");

    auto subset = parse_feature_subset(args.feature_subset);
    hab::Matrix X = hab::pipeline::select_columns(view.train_features, subset);

    hab::WeightScheme scheme = args.weights.empty()
                                   ? hab::parse_weight_scheme(args.model)
                                   : hab::parse_weight_scheme(args.weights);
    std::vector<double> w(view.train_uids.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = hab::region_weight(view.regions[i], scheme);

    if (args.model == "rf") {
        hab::trees::ForestParams params;
        params.n_estimators = args.n_estimators;
        params.seed = args.seed;
        auto model = hab::trees::fit_forest(X, view.targets, w, params);
        hab::trees::save_model(args.out, model);
    } else if (args.model == "gbdt") {
        hab::trees::GbdtParams params;
        params.rounds = args.rounds;
        params.seed = args.seed;
        auto model = hab::trees::fit_gbdt(X, view.targets, w, params);
        hab::trees::save_model(args.out, model);
    } else {
        throw InputError("--model must be rf or gbdt");
    }
    std::cout << "trained " << args.model << " on " << view.train_uids.size()
              << " rows, wrote " << args.out << "\n";
    return 0;
}

struct PredictArgs {
    std::string model, features, out;
    std::string feature_subset;
};

int cmd_predict(const PredictArgs& args) {
    auto model = hab::trees::load_model(args.model);
    auto table = hab::feat::read_feature_csv(args.features);
    auto subset = parse_feature_subset(args.feature_subset);
    hab::Matrix X = hab::pipeline::select_columns(table.features, subset);
    std::vector<double> pred = hab::trees::predict(model, X);
    hab::PredictionSet set(std::filesystem::path(args.model).stem().string());
    for (std::size_t i = 0; i < table.uids.size(); ++i)
        set.add(table.uids[i], hab::PredictionSet::kTestFold, pred[i]);
    hab::io::write_predictions_csv(args.out, set);
    std::cout << "wrote " << set.size() << " predictions to " << args.out << "\n";
    return 0;
}

struct CalibrateArgs {
    std::string oof, labels, out;
    std::string metric = "ra_rmse";
    int clip_cap = 4;
    std::string apply, severity_out;
};

int cmd_calibrate(const CalibrateArgs& args) {
    hab::PredictionSet set = hab::io::read_external_predictions(args.oof);
    hab::pipeline::LabelTable labels(hab::io::read_labels_csv(args.labels));

    std::vector<double> pred;
    std::vector<int> severities;
    std::vector<hab::Region> regions;
    for (const auto& uid : set.uids()) {
        if (set.fold(uid) == hab::PredictionSet::kTestFold) continue;  // OOF rows only
        const hab::Label* label = labels.find(uid);
        if (label == nullptr) throw InputError("no label for OOF uid '" + uid + "'");
        pred.push_back(set.value(uid));
        severities.push_back(label->severity);
        regions.push_back(label->region);
    }
    if (pred.empty()) throw InputError("no OOF rows (fold 0..4) in " + args.oof);

    hab::calib::CalibrationOptions options;
    options.metric = hab::calib::parse_cal_metric(args.metric);
    auto result = hab::calib::fit_cutpoints(pred, severities, regions, options);
    hab::calib::write_cutpoints_json(args.out, result, args.clip_cap);
    std::cout << "cuts: [" << hab::format_double(result.cuts.values[0]) << ", "
              << hab::format_double(result.cuts.values[1]) << ", "
              << hab::format_double(result.cuts.values[2]) << ", "
              << hab::format_double(result.cuts.values[3]) << "] objective "
              << hab::format_double(result.objective) << " (" << args.metric << ")\n";

    if (!args.apply.empty()) {
        if (args.severity_out.empty())
            throw InputError("--apply requires --severity-out");
        hab::PredictionSet to_apply = hab::io::read_external_predictions(args.apply);
        std::vector<std::pair<std::string, int>> rows;
        for (const auto& uid : to_apply.uids()) {
            int sev = hab::calib::severity_from_cutpoints(to_apply.value(uid), result.cuts);
            rows.emplace_back(uid, hab::calib::clip_severity(sev, args.clip_cap));
        }
        hab::io::write_severity_csv(args.severity_out, rows);
        std::cout << "wrote " << rows.size() << " severities to " << args.severity_out
                  << "\n";
    }
    return 0;
}

void print_scores_table(const std::vector<hab::pipeline::ModelScoreRow>& rows) {
    std::printf("%-10s %8s %8s %10s %8s %12s %13s\n", "model", "South", "West",
                "Northeast", "Midwest", "Region mean", "samples mean");
    for (const auto& row : rows) {
        const auto& s = row.scores;
        std::printf("%-10s %8.3f %8.3f %10.3f %8.3f %12.3f %13.3f\n", row.model.c_str(),
                    s.per_region[static_cast<std::size_t>(hab::Region::South)],
                    s.per_region[static_cast<std::size_t>(hab::Region::West)],
                    s.per_region[static_cast<std::size_t>(hab::Region::Northeast)],
                    s.per_region[static_cast<std::size_t>(hab::Region::Midwest)],
                    s.region_mean, s.samples_mean);
    }
}

struct EvaluateArgs {
    std::string pred, labels, json_out;
};

int cmd_evaluate(const EvaluateArgs& args) {
    auto rows = hab::io::read_severity_csv(args.pred);
    hab::pipeline::LabelTable labels(hab::io::read_labels_csv(args.labels));
    std::vector<int> true_sev, pred_sev;
    std::vector<hab::Region> regions;
    for (const auto& [uid, sev] : rows) {
        const hab::Label* label = labels.find(uid);
        if (label == nullptr)
            throw InputError("prediction uid '" + uid + "' has no label");
        true_sev.push_back(label->severity);
        pred_sev.push_back(sev);
        regions.push_back(label->region);
    }
    auto report = hab::metrics::evaluate_severity(true_sev, pred_sev, regions);

    print_scores_table({{"predictions", report.scores}});
    std::printf("\nconfusion (rows = true 1..5, cols = predicted 1..5):\n");
    for (const auto& row : report.confusion) {
        for (auto c : row) std::printf("%8lld", static_cast<long long>(c));
        std::printf("\n");
    }
    std::printf("\noverall accuracy: %.3f\n", report.accuracy.overall);
    if (report.accuracy.severe.has_value())
        std::printf("severe accuracy (true >= 4): %.3f\n", *report.accuracy.severe);
    else
        std::printf("severe accuracy (true >= 4): n/a\n");

    if (!args.json_out.empty()) {
        std::ofstream out(args.json_out, std::ios::trunc);
        if (!out) throw InputError("cannot open " + args.json_out + " for writing");
        out << hab::metrics::report_to_json(report) << '\n';
    }
    return 0;
}

struct RunAllArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
};

int cmd_run_all(const RunAllArgs& args) {
    hab::pipeline::RunConfig config = hab::pipeline::parse_run_config(args.config);
    if (args.seed.has_value()) {
        config.seed = *args.seed;
        for (auto& spec : config.roster) {
            spec.rf.seed = *args.seed;
            spec.gbdt.seed = *args.seed;
        }
    }
    hab::pipeline::validate_run_config(config);
    hab::pipeline::LabelTable labels(hab::io::read_labels_csv(config.labels));
    auto artifacts = hab::pipeline::run_end_to_end(config, labels, &std::cerr);

    std::printf("OOF scores under fitted cuts [%s, %s, %s, %s]:\n\n",
                hab::format_double(artifacts.cuts.cuts.values[0]).c_str(),
                hab::format_double(artifacts.cuts.cuts.values[1]).c_str(),
                hab::format_double(artifacts.cuts.cuts.values[2]).c_str(),
                hab::format_double(artifacts.cuts.cuts.values[3]).c_str());
    print_scores_table(artifacts.model_scores);
    std::printf("\nartifacts in %s\n", artifacts.out_dir.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-source data fusion pipeline for algal bloom severity"};
    app.require_subcommand(1);

    FeaturizeArgs fe;
    auto* featurize = app.add_subcommand(
        "featurize", "Build the 45-column feature table from containers");
    featurize->add_option("--metadata", fe.metadata, "metadata CSV")->required();
    featurize->add_option("--patches", fe.patches, "HABP patch container");
    featurize->add_option("--climate", fe.climate, "HABC climate container");
    featurize->add_option("--dem", fe.dem, "HABD elevation container");
    featurize->add_option("--out", fe.out, "output path prefix")->required();
    featurize->add_option("--impute", fe.impute,
                          "synthetic mean-image imputation: on|off (also train|test|all)");

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "Train one model on the train split");
    train->add_option("--features", tr.features, "feature table CSV")->required();
    train->add_option("--labels", tr.labels, "labels CSV")->required();
    train->add_option("--metadata", tr.metadata, "metadata CSV")->required();
    train->add_option("--model", tr.model, "rf|gbdt");
    train->add_option("--out", tr.out, "output HABM model path")->required();
    train->add_option("--weights", tr.weights, "region weight scheme: rf|gbdt|nn");
    train->add_option("--feature-subset", tr.feature_subset,
                      "comma-separated feature indices or names");
    train->add_option("--seed", tr.seed, "random seed");
    train->add_option("--n-estimators", tr.n_estimators, "forest size (rf)");
    train->add_option("--rounds", tr.rounds, "boosting rounds (gbdt)");

    PredictArgs pr;
    auto* predict = app.add_subcommand("predict", "Predict sqrt-density with a model");
    predict->add_option("--model", pr.model, "HABM model path")->required();
    predict->add_option("--features", pr.features, "feature table CSV")->required();
    predict->add_option("--out", pr.out, "output predictions CSV")->required();
    predict->add_option("--feature-subset", pr.feature_subset,
                        "must match the subset used at training time");

    CalibrateArgs ca;
    auto* calibrate =
        app.add_subcommand("calibrate", "Fit severity cut points on OOF predictions");
    calibrate->add_option("--oof", ca.oof, "predictions CSV (uses fold 0..4 rows)")
        ->required();
    calibrate->add_option("--labels", ca.labels, "labels CSV")->required();
    calibrate->add_option("--out", ca.out, "output cuts JSON")->required();
    calibrate->add_option("--metric", ca.metric, "ra_rmse|rmse");
    calibrate->add_option("--clip-cap", ca.clip_cap, "severity cap (default 4)");
    calibrate->add_option("--apply", ca.apply, "predictions CSV to convert to severity");
    calibrate->add_option("--severity-out", ca.severity_out,
                          "severity CSV output for --apply");

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score severity predictions");
    evaluate->add_option("--pred", ev.pred, "severity CSV")->required();
    evaluate->add_option("--labels", ev.labels, "labels CSV")->required();
    evaluate->add_option("--json", ev.json_out, "also write the report JSON here");

    RunAllArgs ra;
    auto* run_all = app.add_subcommand("run-all", "Run the full pipeline from a config");
    run_all->add_option("--config", ra.config, "INI config path")->required();
    std::uint64_t seed_override = 0;
    auto* seed_opt = run_all->add_option("--seed", seed_override, "override [run] seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (featurize->parsed()) return cmd_featurize(fe);
        if (train->parsed()) return cmd_train(tr);
        if (predict->parsed()) return cmd_predict(pr);
        if (calibrate->parsed()) return cmd_calibrate(ca);
        if (evaluate->parsed()) return cmd_evaluate(ev);
        if (run_all->parsed()) {
            if (seed_opt->count() > 0) ra.seed = seed_override;
            return cmd_run_all(ra);
        }
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
