#include "hab/pipeline/config.hpp"

#include <charconv>
#include <fstream>

#include "hab/io/csv.hpp"

namespace hab::pipeline {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& value, const std::string& context) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw InputError(context + ": expected on/off, got '" + value + "'");
}

std::uint64_t parse_u64(const std::string& value, const std::string& context) {
    std::uint64_t v = 0;
    auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw InputError(context + ": '" + value + "' is not an unsigned integer");
    return v;
}

ModelSpec default_rf_spec() {
    ModelSpec spec;
    spec.name = "rf";
    spec.weights = WeightScheme::Rf;
    return spec;
}

ModelSpec default_gbdt_spec() {
    ModelSpec spec;
    spec.name = "gbdt";
    spec.weights = WeightScheme::Gbdt;
    return spec;
}

}  // namespace

RunConfig default_run_config() {
    RunConfig config;
    config.roster = {default_rf_spec(), default_gbdt_spec()};
    return config;
}

RunConfig parse_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config " + path.string());
    std::string name = path.filename().string();

    RunConfig config = default_run_config();
    std::vector<std::string> roster_names = {"rf", "gbdt"};
    bool roster_explicit = false;

    std::string section;
    std::string line;
    std::size_t line_no = 0;
    auto ctx = [&] { return name + " line " + std::to_string(line_no); };

    // Deferred key applications so model params land on the parsed roster.
    ModelSpec rf = default_rf_spec();
    ModelSpec gbdt = default_gbdt_spec();

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw InputError(ctx() + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw InputError(ctx() + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));

        if (section == "paths") {
            if (key == "features") config.features = value;
            else if (key == "labels") config.labels = value;
            else if (key == "metadata") config.metadata = value;
            else if (key == "out_dir") config.out_dir = value;
            else if (key == "patches") config.patches = value;
            else if (key == "climate") config.climate = value;
            else if (key == "dem") config.dem = value;
            else throw InputError(ctx() + ": unknown key '" + key + "' in [paths]");
        } else if (section == "models") {
            if (key == "roster") {
                roster_names.clear();
                for (auto& tok : io::split_csv_line(value)) {
                    std::string m = trim(tok);
                    if (m != "rf" && m != "gbdt")
                        throw InputError(ctx() + ": unknown roster model '" + m + "'");
                    roster_names.push_back(m);
                }
                roster_explicit = true;
                if (roster_names.empty())
                    throw InputError(ctx() + ": roster must not be empty");
            } else {
                throw InputError(ctx() + ": unknown key '" + key + "' in [models]");
            }
        } else if (section == "external") {
            config.external.emplace_back(key, std::filesystem::path(value));
        } else if (section == "rf") {
            if (key == "n_estimators")
                rf.rf.n_estimators = parse_u64(value, ctx());
            else if (key == "min_samples_leaf")
                rf.rf.min_samples_leaf = parse_u64(value, ctx());
            else if (key == "features_per_node")
                rf.rf.features_per_node = parse_u64(value, ctx());
            else if (key == "bootstrap")
                rf.rf.bootstrap = parse_bool(value, ctx());
            else if (key == "weight_scheme")
                rf.weights = parse_weight_scheme(value);
            else
                throw InputError(ctx() + ": unknown key '" + key + "' in [rf]");
        } else if (section == "gbdt") {
            if (key == "rounds")
                gbdt.gbdt.rounds = parse_u64(value, ctx());
            else if (key == "learning_rate")
                gbdt.gbdt.learning_rate = io::parse_csv_double(value, ctx());
            else if (key == "num_leaves")
                gbdt.gbdt.num_leaves = parse_u64(value, ctx());
            else if (key == "bagging_fraction")
                gbdt.gbdt.bagging_fraction = io::parse_csv_double(value, ctx());
            else if (key == "bagging_freq")
                gbdt.gbdt.bagging_freq = parse_u64(value, ctx());
            else if (key == "min_samples_leaf")
                gbdt.gbdt.min_samples_leaf = parse_u64(value, ctx());
            else if (key == "subsample")
                config.gbdt_subsample_alias = io::parse_csv_double(value, ctx());
            else if (key == "importance_threshold")
                gbdt.importance_threshold = io::parse_csv_double(value, ctx());
            else if (key == "weight_scheme")
                gbdt.weights = parse_weight_scheme(value);
            else
                throw InputError(ctx() + ": unknown key '" + key + "' in [gbdt]");
        } else if (section == "calibration") {
            if (key == "metric")
                config.calibration.metric = calib::parse_cal_metric(value);
            else if (key == "clip_cap")
                config.clip_cap = static_cast<int>(parse_u64(value, ctx()));
            else if (key == "max_iter")
                config.calibration.nelder_mead.max_iter = parse_u64(value, ctx());
            else if (key == "xatol")
                config.calibration.nelder_mead.xatol = io::parse_csv_double(value, ctx());
            else if (key == "fatol")
                config.calibration.nelder_mead.fatol = io::parse_csv_double(value, ctx());
            else
                throw InputError(ctx() + ": unknown key '" + key + "' in [calibration]");
        } else if (section == "run") {
            if (key == "seed")
                config.seed = parse_u64(value, ctx());
            else if (key == "folds")
                config.folds = static_cast<int>(parse_u64(value, ctx()));
            else if (key == "imputation_mode")
                config.impute = feat::parse_impute_mode(value);
            else if (key == "stratify") {
                if (value == "off") config.stratify_by_severity = false;
                else if (value == "severity") config.stratify_by_severity = true;
                else throw InputError(ctx() + ": stratify must be off or severity");
            } else {
                throw InputError(ctx() + ": unknown key '" + key + "' in [run]");
            }
        } else if (section == "meta") {
            config.meta[key] = value;
        } else if (section.empty()) {
            throw InputError(ctx() + ": key outside any section");
        } else {
            throw InputError(ctx() + ": unknown section [" + section + "]");
        }
    }

    (void)roster_explicit;
    config.roster.clear();
    for (const auto& m : roster_names)
        config.roster.push_back(m == "rf" ? rf : gbdt);
    // Seeds follow the single run seed unless a later stage derives its own.
    for (auto& spec : config.roster) {
        spec.rf.seed = config.seed;
        spec.gbdt.seed = config.seed;
    }
    return config;
}

void validate_run_config(const RunConfig& config) {
    if (config.roster.empty() && config.external.empty())
        throw InputError("config: roster and external lists are both empty");
    if (config.metadata.empty()) throw InputError("config: metadata path is required");
    if (config.labels.empty()) throw InputError("config: labels path is required");
    if (config.out_dir.empty()) throw InputError("config: out_dir is required");
    if (config.features.empty() && config.patches.empty() && config.climate.empty() &&
        config.dem.empty())
        throw InputError(
            "config: either a features table or at least one raw container is required");

    auto must_exist = [](const std::filesystem::path& p, const char* what) {
        if (!p.empty() && !std::filesystem::exists(p))
            throw InputError(std::string("config: ") + what + " path does not exist: " +
                             p.string());
    };
    must_exist(config.features, "features");
    must_exist(config.labels, "labels");
    must_exist(config.metadata, "metadata");
    must_exist(config.patches, "patches");
    must_exist(config.climate, "climate");
    must_exist(config.dem, "dem");
    for (const auto& [name, path] : config.external)
        if (!std::filesystem::exists(path))
            throw InputError("config: external prediction file for '" + name +
                             "' does not exist: " + path.string());
    if (config.folds < 2) throw InputError("config: folds must be at least 2");
    if (config.clip_cap < 1 || config.clip_cap > 5)
        throw InputError("config: clip_cap must be in 1..5");
}

}  // namespace hab::pipeline
