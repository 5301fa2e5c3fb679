#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ctxmine/dataset.hpp"

namespace ctxmine::eval {

struct PredictionRecord {
    std::string instance_id;
    std::string model_name;
    std::string prediction;
    double log_likelihood = 0.0;  // <= 0, sequence-level, taken as given
};

// Prediction file JSONL: {"instance_id", "model", "prediction", "log_likelihood"}.
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);
void write_predictions(const std::vector<PredictionRecord>& preds,
                       const std::filesystem::path& path);

// True iff the strings are identical after collapsing every maximal
// whitespace run to a single space and trimming the ends.
bool is_correct(const std::string& prediction, const std::string& reference);

struct Accuracy {
    long correct = 0;
    long total = 0;
    double percent = 0.0;  // rounded to 2 decimals
};

// Throws MissingInstance when a prediction names an unknown instance.
Accuracy accuracy(std::span<const PredictionRecord> preds,
                  std::span<const data::DatasetRow> dataset);

// Instance ids whose prediction matches the reference.
std::set<std::string> correct_set(std::span<const PredictionRecord> preds,
                                  std::span<const data::DatasetRow> dataset);

struct McNemarResult {
    long b = 0;  // only model A correct
    long c = 0;  // only model B correct
    double statistic = 0.0;
    double p_value = 1.0;
    double odds_ratio = 0.0;  // c/b: >1 favors model B
    enum class Method { ChiSquareCC, ExactBinomial } method = Method::ExactBinomial;
    bool degenerate = false;  // b == c == 0: p = 1, OR reported as NaN
};

// Discordant-pair McNemar: chi-square with continuity correction when
// b + c >= 25, exact two-sided binomial otherwise.
McNemarResult mcnemar_test(const std::set<std::string>& a_correct,
                           const std::set<std::string>& b_correct,
                           const std::set<std::string>& universe);

// Step-down Holm adjustment; returns values in the input order.
std::vector<double> holm_adjust(const std::vector<double>& p_values);

struct Complementarity {
    double shared_pct = 0.0;
    double only_a_pct = 0.0;
    double only_b_pct = 0.0;
    long union_size = 0;
};

// Percentages of |a∩b|, |a\b|, |b\a| over |a∪b|. Throws EmptyUnion.
Complementarity complementarity(const std::set<std::string>& a_correct,
                                const std::set<std::string>& b_correct);

// e^log_likelihood in (0, 1]. Throws PositiveLogLik.
double confidence(double log_likelihood);

struct BucketRow {
    int bucket = 0;  // 1-based
    double lo = 0.0;
    double hi = 0.0;
    long n = 0;
    std::optional<double> pct_correct;  // absent when the bucket is empty
};

// Ten confidence buckets: [0.00, 0.10], (0.10, 0.20], ..., (0.90, 1.00].
std::vector<BucketRow> bucket_by_confidence(std::span<const PredictionRecord> preds,
                                            std::span<const data::DatasetRow> dataset);

// Per instance, the prediction with the maximum log-likelihood across models;
// ties go to the model listed first in priority order. Every model must cover
// every instance (throws CoverageGap otherwise).
std::vector<PredictionRecord> ensemble_select(
    const std::vector<std::pair<std::string, std::vector<PredictionRecord>>>& per_model_preds);

struct ModelAccuracyRow {
    std::string model;
    Accuracy accuracy;
};

struct PairwiseRow {
    std::string model;  // compared against the baseline
    McNemarResult test;
    double holm_p = 1.0;
};

struct ComplementarityRow {
    std::string model;
    Complementarity values;
};

struct EvalReport {
    std::string baseline;
    std::vector<ModelAccuracyRow> accuracies;
    std::vector<PairwiseRow> pairwise;           // Holm-adjusted over this family
    std::vector<ComplementarityRow> complementarity;
    std::vector<std::pair<std::string, std::vector<BucketRow>>> buckets;
    std::optional<ModelAccuracyRow> ensemble;
};

// Accuracy per model, McNemar of every model vs. the baseline (Holm-adjusted
// over that family), complementarity vs. the baseline, confidence buckets,
// and the confidence-based ensemble row when include_ensemble is set.
EvalReport build_report(
    std::span<const data::DatasetRow> dataset,
    const std::vector<std::pair<std::string, std::vector<PredictionRecord>>>& per_model_preds,
    const std::string& baseline_name, bool include_ensemble = true);

std::string render_text(const EvalReport& report);
std::string render_json(const EvalReport& report);
std::string render_buckets_csv(const EvalReport& report);

}  // namespace ctxmine::eval
