#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "litho/core.hpp"
#include "litho/features.hpp"
#include "litho/models/gbdt.hpp"
#include "litho/models/model.hpp"

namespace litho::eval {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

ConfusionCounts confusion_at(std::span<const std::uint8_t> y, std::span<const double> scores,
                             double threshold);

struct CurvePoint {
    double threshold = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
    double precision = 1.0;
    double recall = 0.0;
};

// Threshold-swept trajectory with equal scores grouped into single steps.
std::vector<CurvePoint> curve_points(std::span<const std::uint8_t> y,
                                     std::span<const double> scores);

// Area under the ROC trajectory; numerically identical to the pairwise
// Mann-Whitney estimator with half credit for ties. Requires both classes.
double roc_auc(std::span<const std::uint8_t> y, std::span<const double> scores);

// Average precision (step interpolation, ties grouped). Requires positives.
double pr_auc(std::span<const std::uint8_t> y, std::span<const double> scores);

// Length-weighted accuracy at the given threshold.
double accuracy_l(const LabeledBins& bins, double threshold = 0.5);

struct Fold {
    std::vector<std::string> train_wells;
    std::string test_well;
};

// One fold per distinct well; laterals of a well stay together. Requires
// at least two wells.
std::vector<Fold> lowo_folds(const features::FeatureMatrix& matrix);

struct FoldResult {
    std::string test_well;
    bool flagged = false; // single-class training data; excluded from pooling
    std::optional<double> roc_auc;
    std::optional<double> pr_auc;
    double accuracy_l = 0.0;
    double majority_accuracy_l = 0.0; // train-majority constant prediction
    double shale_share = 0.0;         // length share of class 1 in the test well
    std::size_t n_rows = 0;
};

struct EvaluationReport {
    std::vector<FoldResult> folds;
    std::optional<double> pooled_roc_auc;
    std::optional<double> pooled_pr_auc;
    double pooled_accuracy_l = 0.0;
    double pooled_majority_accuracy_l = 0.0;
    double class_share = 0.0; // length-weighted pooled share of class 1
    double runtime_seconds = 0.0;
    // Concatenated test predictions in fold order (flagged folds excluded).
    std::vector<std::uint8_t> pooled_y;
    std::vector<double> pooled_scores;
    std::vector<double> pooled_lengths;
};

using ModelFactory =
    std::function<std::unique_ptr<models::Classifier>(std::uint64_t fold_seed)>;

// Fits on each fold's train wells, scores its test well, reports per-fold
// and pooled metrics. Deterministic for a fixed seed: fold i trains with
// seed derive_seed(seed, "fold", i) regardless of execution order.
EvaluationReport evaluate_cv(const features::FeatureMatrix& matrix, const ModelFactory& factory,
                             std::span<const Fold> folds, std::uint64_t seed);

struct GreedyResult {
    std::vector<std::string> selected;
    std::vector<double> step_scores; // pooled ROC AUC after each accepted step
    double base_score = 0.5;         // empty feature set
};

// Forward selection maximizing pooled LOWO-CV ROC AUC, starting from the
// empty set; stops when the best improvement falls below tol.
GreedyResult greedy_select(const features::FeatureMatrix& matrix,
                           const std::vector<std::string>& pool, const ModelFactory& factory,
                           std::span<const Fold> folds, std::uint64_t seed, double tol = 1e-4,
                           std::size_t max_steps = 0);

struct GridPoint {
    models::GbdtParams params;
    std::optional<double> roc_auc;
    std::optional<double> pr_auc;
    double accuracy_l = 0.0;
};

struct GridResult {
    models::GbdtParams best;
    std::vector<GridPoint> table;
};

// Exhaustive GBDT grid; best by pooled ROC AUC, ties resolved toward fewer
// trees, then smaller depth, then grid order.
GridResult grid_search(const features::FeatureMatrix& matrix,
                       std::span<const models::GbdtParams> grid, std::span<const Fold> folds,
                       std::uint64_t seed);

void write_roc_csv(const std::string& path, std::span<const std::uint8_t> y,
                   std::span<const double> scores);
void write_pr_csv(const std::string& path, std::span<const std::uint8_t> y,
                  std::span<const double> scores);

} // namespace litho::eval
