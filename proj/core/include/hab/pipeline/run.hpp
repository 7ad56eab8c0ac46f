#pragma once

#include <filesystem>
#include <iosfwd>
#include <unordered_map>

#include "hab/metrics/metrics.hpp"
#include "hab/pipeline/config.hpp"
#include "hab/pipeline/folds.hpp"
#include "hab/trees/importance.hpp"

namespace hab::pipeline {

/// Label access point. The pipeline only ever asks for train-split uids;
/// tests wrap a provider to assert that test labels are never touched.
class LabelProvider {
public:
    virtual ~LabelProvider() = default;
    virtual const Label* find(const std::string& uid) const = 0;
};

class LabelTable final : public LabelProvider {
public:
    explicit LabelTable(std::vector<Label> labels);
    const Label* find(const std::string& uid) const override;

private:
    std::vector<Label> labels_;
    std::unordered_map<std::string, std::size_t> index_;
};

Matrix select_columns(const Matrix& X, std::span<const std::size_t> cols);

/// Feature table rows joined with metadata and train labels. Label lookups
/// happen here, for train uids only.
struct TrainingView {
    std::vector<std::string> train_uids;
    std::vector<std::string> test_uids;
    Matrix train_features;
    Matrix test_features;
    std::vector<double> targets;  // sqrt(density)
    std::vector<int> severities;
    std::vector<Region> regions;
};

TrainingView make_training_view(const feat::FeatureTable& table,
                                const std::vector<SampleMeta>& metadata,
                                const LabelProvider& labels);

struct CvResult {
    PredictionSet oof;
    PredictionSet test;
    std::vector<trees::FeatureImportance> fold_importance;  // one per fold
};

/// Per fold: train on the remaining folds with the spec's region weights,
/// predict the held-out fold and the full test block; test predictions are
/// the mean over the fold models. `feature_subset` (empty = all columns)
/// applies to both training and prediction.
CvResult run_model_cv(const ModelSpec& spec, const TrainingView& view,
                      const FoldAssignment& folds,
                      std::span<const std::size_t> feature_subset, std::uint64_t seed);

/// Per-uid unweighted mean across sets; uid coverage must be identical.
PredictionSet ensemble_average(std::span<const PredictionSet* const> sets);

struct ModelScoreRow {
    std::string model;
    metrics::RegionScores scores;
};

struct RunArtifacts {
    std::filesystem::path out_dir;
    std::vector<std::filesystem::path> files;
    metrics::EvalReport report;                  // fused OOF severities
    calib::CalibrationResult cuts;
    std::vector<std::size_t> selected_features;  // gbdt columns, empty = all
    std::vector<ModelScoreRow> model_scores;     // per leg + fused, OOF
};

/// Full Fig.-7 sequence: featurize (when no table is given) -> per-model CV
/// -> fuse -> cut-point fit on fused OOF -> severity + clip -> evaluate OOF
/// -> persist artifacts and manifest. Any failure removes the partial
/// artifacts and rethrows as StageError.
RunArtifacts run_end_to_end(const RunConfig& config, const LabelProvider& labels,
                            std::ostream* log = nullptr);

}  // namespace hab::pipeline
