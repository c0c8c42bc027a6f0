#include "litho/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "litho/csv.hpp"
#include "litho/parallel.hpp"
#include "litho/seeds.hpp"

namespace litho::eval {

namespace {

struct ScoreGroup {
    double score = 0.0;
    std::size_t pos = 0;
    std::size_t neg = 0;
};

// Descending-score tie groups.
std::vector<ScoreGroup> score_groups(std::span<const std::uint8_t> y,
                                     std::span<const double> scores) {
    if (y.size() != scores.size()) throw DataError("metrics: y/scores length mismatch");
    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    std::vector<ScoreGroup> groups;
    for (std::size_t i = 0; i < order.size();) {
        ScoreGroup g;
        g.score = scores[order[i]];
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == g.score) {
            (y[order[j]] ? g.pos : g.neg) += 1;
            ++j;
        }
        groups.push_back(g);
        i = j;
    }
    return groups;
}

} // namespace

ConfusionCounts confusion_at(std::span<const std::uint8_t> y, std::span<const double> scores,
                             double threshold) {
    if (y.size() != scores.size()) throw DataError("metrics: y/scores length mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const bool pred = scores[i] >= threshold;
        if (y[i]) {
            (pred ? c.tp : c.fn) += 1;
        } else {
            (pred ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

std::vector<CurvePoint> curve_points(std::span<const std::uint8_t> y,
                                     std::span<const double> scores) {
    const auto groups = score_groups(y, scores);
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& g : groups) {
        n_pos += g.pos;
        n_neg += g.neg;
    }
    std::vector<CurvePoint> out;
    out.reserve(groups.size());
    std::size_t tp = 0, fp = 0;
    for (const auto& g : groups) {
        tp += g.pos;
        fp += g.neg;
        CurvePoint p;
        p.threshold = g.score;
        p.tpr = n_pos ? static_cast<double>(tp) / static_cast<double>(n_pos) : 0.0;
        p.fpr = n_neg ? static_cast<double>(fp) / static_cast<double>(n_neg) : 0.0;
        p.recall = p.tpr;
        p.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
        out.push_back(p);
    }
    return out;
}

double roc_auc(std::span<const std::uint8_t> y, std::span<const double> scores) {
    const auto groups = score_groups(y, scores);
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& g : groups) {
        n_pos += g.pos;
        n_neg += g.neg;
    }
    if (n_pos == 0 || n_neg == 0)
        throw DataError("roc_auc: both classes must be present");

    // Pair counting in exact integer+half units: every negative in a group
    // is beaten by all positives from strictly higher groups and ties the
    // positives of its own group.
    double units = 0.0;
    double pos_above = 0.0;
    for (const auto& g : groups) {
        units += static_cast<double>(g.neg) * pos_above +
                 0.5 * static_cast<double>(g.pos) * static_cast<double>(g.neg);
        pos_above += static_cast<double>(g.pos);
    }
    return units / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double pr_auc(std::span<const std::uint8_t> y, std::span<const double> scores) {
    const auto groups = score_groups(y, scores);
    std::size_t n_pos = 0;
    for (const auto& g : groups) n_pos += g.pos;
    if (n_pos == 0) throw DataError("pr_auc: positive class must be present");

    double ap = 0.0;
    std::size_t tp = 0, scored = 0;
    for (const auto& g : groups) {
        tp += g.pos;
        scored += g.pos + g.neg;
        if (g.pos == 0) continue;
        const double precision = static_cast<double>(tp) / static_cast<double>(scored);
        const double d_recall = static_cast<double>(g.pos) / static_cast<double>(n_pos);
        ap += d_recall * precision;
    }
    return ap;
}

double accuracy_l(const LabeledBins& bins, double threshold) {
    bins.validate();
    if (bins.lengths.empty()) throw DataError("accuracy_l: empty input");
    double correct = 0.0, total = 0.0;
    for (std::size_t i = 0; i < bins.lengths.size(); ++i) {
        const std::uint8_t pred = bins.scores[i] >= threshold ? 1 : 0;
        total += bins.lengths[i];
        if (pred == bins.y[i]) correct += bins.lengths[i];
    }
    return correct / total;
}

std::vector<Fold> lowo_folds(const features::FeatureMatrix& matrix) {
    std::set<std::string> wells;
    for (const auto& r : matrix.rows) wells.insert(r.well_id);
    if (wells.size() < 2)
        throw DataError("lowo_folds: need at least 2 wells, got " + std::to_string(wells.size()));
    std::vector<Fold> folds;
    for (const std::string& test : wells) {
        Fold f;
        f.test_well = test;
        for (const std::string& w : wells) {
            if (w != test) f.train_wells.push_back(w);
        }
        folds.push_back(std::move(f));
    }
    return folds;
}

EvaluationReport evaluate_cv(const features::FeatureMatrix& matrix, const ModelFactory& factory,
                             std::span<const Fold> folds, std::uint64_t seed) {
    if (folds.empty()) throw ConfigError("evaluate_cv: no folds");
    const auto t0 = std::chrono::steady_clock::now();

    struct FoldOutput {
        FoldResult result;
        std::vector<std::uint8_t> y;
        std::vector<double> scores;
        std::vector<double> lengths;
        std::vector<std::uint8_t> majority_pred;
        std::string error;
    };
    std::vector<FoldOutput> outputs(folds.size());

    parallel::parallel_for(folds.size(), [&](std::size_t fi) {
        FoldOutput& out = outputs[fi];
        const Fold& fold = folds[fi];
        out.result.test_well = fold.test_well;
        try {
            std::vector<std::uint8_t> is_test(matrix.n_rows()), is_train(matrix.n_rows());
            for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
                const bool test = matrix.rows[r].well_id == fold.test_well;
                is_test[r] = test;
                is_train[r] = !test;
            }
            const features::FeatureMatrix train = matrix.filter_rows(is_train);
            const features::FeatureMatrix test = matrix.filter_rows(is_test);
            out.result.n_rows = test.n_rows();
            if (test.n_rows() == 0) {
                out.result.flagged = true;
                return;
            }

            double test_len = 0.0, test_len1 = 0.0;
            for (std::size_t r = 0; r < test.n_rows(); ++r) {
                test_len += test.row_length_m[r];
                if (test.target[r]) test_len1 += test.row_length_m[r];
            }
            out.result.shale_share = test_len1 / test_len;

            std::size_t train_ones = 0;
            for (std::uint8_t v : train.target) train_ones += (v == 1);
            const bool single_class =
                train.n_rows() == 0 || train_ones == 0 || train_ones == train.n_rows();

            const std::uint8_t majority =
                (2 * train_ones > train.n_rows()) ? 1 : 0; // ties favor sand
            double maj_correct = 0.0;
            for (std::size_t r = 0; r < test.n_rows(); ++r) {
                if (test.target[r] == majority) maj_correct += test.row_length_m[r];
            }
            out.result.majority_accuracy_l = maj_correct / test_len;
            out.majority_pred.assign(test.n_rows(), majority);

            if (single_class) {
                out.result.flagged = true; // cannot fit; excluded from pooling
                return;
            }

            auto model = factory(derive_seed(seed, "fold", fi));
            model->fit(train);
            out.scores = model->predict_proba(test);
            out.y = test.target;
            out.lengths = test.row_length_m;

            LabeledBins bins{out.lengths, out.y, out.scores};
            out.result.accuracy_l = accuracy_l(bins);
            std::size_t pos = 0, neg = 0;
            for (std::uint8_t v : out.y) (v ? pos : neg) += 1;
            if (pos > 0 && neg > 0) out.result.roc_auc = roc_auc(out.y, out.scores);
            if (pos > 0) out.result.pr_auc = pr_auc(out.y, out.scores);
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });

    for (const FoldOutput& out : outputs) {
        if (!out.error.empty())
            throw TrainError("fold " + out.result.test_well + ": " + out.error);
    }

    EvaluationReport report;
    double maj_correct = 0.0, total_len = 0.0, len1 = 0.0, model_correct = 0.0;
    for (FoldOutput& out : outputs) {
        report.folds.push_back(out.result);
        if (out.result.flagged) continue;
        for (std::size_t i = 0; i < out.y.size(); ++i) {
            report.pooled_y.push_back(out.y[i]);
            report.pooled_scores.push_back(out.scores[i]);
            report.pooled_lengths.push_back(out.lengths[i]);
            total_len += out.lengths[i];
            if (out.y[i]) len1 += out.lengths[i];
            if (out.y[i] == out.majority_pred[i]) maj_correct += out.lengths[i];
            const std::uint8_t pred = out.scores[i] >= 0.5 ? 1 : 0;
            if (pred == out.y[i]) model_correct += out.lengths[i];
        }
    }
    if (!report.pooled_y.empty()) {
        report.class_share = len1 / total_len;
        report.pooled_accuracy_l = model_correct / total_len;
        report.pooled_majority_accuracy_l = maj_correct / total_len;
        std::size_t pos = 0, neg = 0;
        for (std::uint8_t v : report.pooled_y) (v ? pos : neg) += 1;
        if (pos > 0 && neg > 0) report.pooled_roc_auc = roc_auc(report.pooled_y, report.pooled_scores);
        if (pos > 0) report.pooled_pr_auc = pr_auc(report.pooled_y, report.pooled_scores);
    }
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

GreedyResult greedy_select(const features::FeatureMatrix& matrix,
                           const std::vector<std::string>& pool, const ModelFactory& factory,
                           std::span<const Fold> folds, std::uint64_t seed, double tol,
                           std::size_t max_steps) {
    if (pool.empty()) throw ConfigError("greedy_select: empty candidate pool");
    for (const std::string& name : pool) {
        if (matrix.column_index(name) < 0)
            throw DataError("greedy_select: unknown candidate column " + name);
    }

    GreedyResult result;
    std::vector<std::string> remaining = pool;
    double current = result.base_score;

    while (!remaining.empty() && (max_steps == 0 || result.selected.size() < max_steps)) {
        double best_score = -1.0;
        std::size_t best_idx = 0;
        for (std::size_t ci = 0; ci < remaining.size(); ++ci) {
            std::vector<std::string> candidate_set = result.selected;
            candidate_set.push_back(remaining[ci]);
            const auto sub = matrix.select_columns(candidate_set);
            const EvaluationReport rep = evaluate_cv(sub, factory, folds, seed);
            const double score = rep.pooled_roc_auc.value_or(0.5);
            if (score > best_score) {
                best_score = score;
                best_idx = ci;
            }
        }
        if (best_score - current < tol) break;
        result.selected.push_back(remaining[best_idx]);
        result.step_scores.push_back(best_score);
        current = best_score;
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_idx));
    }
    return result;
}

GridResult grid_search(const features::FeatureMatrix& matrix,
                       std::span<const models::GbdtParams> grid, std::span<const Fold> folds,
                       std::uint64_t seed) {
    if (grid.empty()) throw ConfigError("grid_search: empty grid");
    GridResult result;
    result.table.reserve(grid.size());
    for (const models::GbdtParams& params : grid) {
        ModelFactory factory = [&params](std::uint64_t fold_seed) {
            models::GbdtParams p = params;
            p.seed = fold_seed;
            return std::make_unique<models::GbdtModel>(p);
        };
        const EvaluationReport rep = evaluate_cv(matrix, factory, folds, seed);
        GridPoint point;
        point.params = params;
        point.roc_auc = rep.pooled_roc_auc;
        point.pr_auc = rep.pooled_pr_auc;
        point.accuracy_l = rep.pooled_accuracy_l;
        result.table.push_back(point);
    }

    std::size_t best = 0;
    auto better = [&](const GridPoint& a, const GridPoint& b) {
        const double sa = a.roc_auc.value_or(0.0), sb = b.roc_auc.value_or(0.0);
        if (sa != sb) return sa > sb;
        if (a.params.n_trees != b.params.n_trees) return a.params.n_trees < b.params.n_trees;
        return a.params.max_depth < b.params.max_depth;
    };
    for (std::size_t i = 1; i < result.table.size(); ++i) {
        if (better(result.table[i], result.table[best])) best = i;
    }
    result.best = result.table[best].params;
    return result;
}

void write_roc_csv(const std::string& path, std::span<const std::uint8_t> y,
                   std::span<const double> scores) {
    const auto points = curve_points(y, scores);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out << "threshold,fpr,tpr\n";
    out << "inf,0,0\n";
    for (const CurvePoint& p : points)
        out << csv::format_double(p.threshold) << ',' << csv::format_double(p.fpr) << ','
            << csv::format_double(p.tpr) << '\n';
}

void write_pr_csv(const std::string& path, std::span<const std::uint8_t> y,
                  std::span<const double> scores) {
    const auto points = curve_points(y, scores);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out << "threshold,recall,precision\n";
    for (const CurvePoint& p : points)
        out << csv::format_double(p.threshold) << ',' << csv::format_double(p.recall) << ','
            << csv::format_double(p.precision) << '\n';
}

} // namespace litho::eval
