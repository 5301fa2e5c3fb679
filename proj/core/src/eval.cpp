#include "ctxmine/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "ctxmine/errors.hpp"
#include "ctxmine/strings.hpp"

namespace ctxmine::eval {
namespace {

double round2(double x) { return std::round(x * 100.0) / 100.0; }

// Upper tail of the chi-square distribution with one degree of freedom.
double chi_square_1df_sf(double x) { return std::erfc(std::sqrt(x / 2.0)); }

double log_choose(long n, long k) {
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

// Two-sided exact binomial test at p = 1/2 on min(b, c) of n trials.
double exact_binomial_p(long b, long c) {
    const long n = b + c;
    const long k = std::min(b, c);
    double tail = 0.0;
    for (long i = 0; i <= k; ++i) {
        tail += std::exp(log_choose(n, i) - static_cast<double>(n) * std::log(2.0));
    }
    return std::min(1.0, 2.0 * tail);
}

std::unordered_map<std::string, const data::DatasetRow*> index_dataset(
    std::span<const data::DatasetRow> dataset) {
    std::unordered_map<std::string, const data::DatasetRow*> by_id;
    for (const auto& row : dataset) by_id[row.instance_id] = &row;
    return by_id;
}

int bucket_index(double conf) {
    if (conf <= 0.10) return 0;
    const int idx = static_cast<int>(std::ceil(conf * 10.0 - 1e-9)) - 1;
    return std::clamp(idx, 0, 9);
}

std::string format_pct(std::optional<double> value) {
    if (!value) return "-";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << *value;
    return os.str();
}

}  // namespace

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read predictions " + path.string());
    std::vector<PredictionRecord> preds;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw SchemaError("malformed prediction line", line_no);
        }
        try {
            PredictionRecord p;
            p.instance_id = j.at("instance_id").get<std::string>();
            p.model_name = j.at("model").get<std::string>();
            p.prediction = j.at("prediction").get<std::string>();
            p.log_likelihood = j.at("log_likelihood").get<double>();
            preds.push_back(std::move(p));
        } catch (const nlohmann::json::exception&) {
            throw SchemaError("prediction line missing required field", line_no);
        }
    }
    return preds;
}

void write_predictions(const std::vector<PredictionRecord>& preds,
                       const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write predictions " + path.string());
    for (const auto& p : preds) {
        nlohmann::json j;
        j["instance_id"] = p.instance_id;
        j["model"] = p.model_name;
        j["prediction"] = p.prediction;
        j["log_likelihood"] = p.log_likelihood;
        out << j.dump() << '\n';
    }
}

bool is_correct(const std::string& prediction, const std::string& reference) {
    return collapse_whitespace(prediction) == collapse_whitespace(reference);
}

std::set<std::string> correct_set(std::span<const PredictionRecord> preds,
                                  std::span<const data::DatasetRow> dataset) {
    const auto by_id = index_dataset(dataset);
    std::set<std::string> correct;
    for (const auto& p : preds) {
        auto it = by_id.find(p.instance_id);
        if (it == by_id.end()) {
            throw MissingInstance("prediction references unknown instance " + p.instance_id);
        }
        if (is_correct(p.prediction, it->second->target)) correct.insert(p.instance_id);
    }
    return correct;
}

Accuracy accuracy(std::span<const PredictionRecord> preds,
                  std::span<const data::DatasetRow> dataset) {
    Accuracy acc;
    acc.total = static_cast<long>(dataset.size());
    acc.correct = static_cast<long>(correct_set(preds, dataset).size());
    acc.percent = acc.total == 0
                      ? 0.0
                      : round2(100.0 * static_cast<double>(acc.correct) /
                               static_cast<double>(acc.total));
    return acc;
}

McNemarResult mcnemar_test(const std::set<std::string>& a_correct,
                           const std::set<std::string>& b_correct,
                           const std::set<std::string>& universe) {
    McNemarResult result;
    for (const auto& id : a_correct) {
        if (!universe.count(id)) throw MissingInstance("a_correct outside universe: " + id);
        if (!b_correct.count(id)) ++result.b;
    }
    for (const auto& id : b_correct) {
        if (!universe.count(id)) throw MissingInstance("b_correct outside universe: " + id);
        if (!a_correct.count(id)) ++result.c;
    }

    if (result.b == 0 && result.c == 0) {
        result.degenerate = true;
        result.p_value = 1.0;
        result.statistic = 0.0;
        result.odds_ratio = std::numeric_limits<double>::quiet_NaN();
        return result;
    }
    const long n = result.b + result.c;
    if (n >= 25) {
        const double diff = std::abs(static_cast<double>(result.b - result.c)) - 1.0;
        result.statistic = diff * diff / static_cast<double>(n);
        result.p_value = chi_square_1df_sf(result.statistic);
        result.method = McNemarResult::Method::ChiSquareCC;
    } else {
        result.statistic = static_cast<double>(std::min(result.b, result.c));
        result.p_value = exact_binomial_p(result.b, result.c);
        result.method = McNemarResult::Method::ExactBinomial;
    }
    result.odds_ratio = result.b > 0 ? static_cast<double>(result.c) / static_cast<double>(result.b)
                                     : std::numeric_limits<double>::infinity();
    return result;
}

std::vector<double> holm_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    std::vector<double> adjusted(m, 0.0);
    double running_max = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double scaled = p_values[order[i]] * static_cast<double>(m - i);
        running_max = std::max(running_max, scaled);
        adjusted[order[i]] = std::min(1.0, running_max);
    }
    return adjusted;
}

Complementarity complementarity(const std::set<std::string>& a_correct,
                                const std::set<std::string>& b_correct) {
    std::set<std::string> uni = a_correct;
    uni.insert(b_correct.begin(), b_correct.end());
    if (uni.empty()) throw EmptyUnion("complementarity: both correct sets are empty");

    long shared = 0;
    for (const auto& id : a_correct) {
        if (b_correct.count(id)) ++shared;
    }
    const double u = static_cast<double>(uni.size());
    Complementarity result;
    result.union_size = static_cast<long>(uni.size());
    result.shared_pct = round2(100.0 * static_cast<double>(shared) / u);
    result.only_a_pct =
        round2(100.0 * static_cast<double>(static_cast<long>(a_correct.size()) - shared) / u);
    result.only_b_pct =
        round2(100.0 * static_cast<double>(static_cast<long>(b_correct.size()) - shared) / u);
    return result;
}

double confidence(double log_likelihood) {
    if (log_likelihood > 0.0) {
        throw PositiveLogLik("log-likelihood must be <= 0, got " +
                             std::to_string(log_likelihood));
    }
    return std::exp(log_likelihood);
}

std::vector<BucketRow> bucket_by_confidence(std::span<const PredictionRecord> preds,
                                            std::span<const data::DatasetRow> dataset) {
    const auto by_id = index_dataset(dataset);
    std::array<long, 10> n{};
    std::array<long, 10> correct{};
    for (const auto& p : preds) {
        auto it = by_id.find(p.instance_id);
        if (it == by_id.end()) {
            throw MissingInstance("prediction references unknown instance " + p.instance_id);
        }
        const int idx = bucket_index(confidence(p.log_likelihood));
        ++n[static_cast<std::size_t>(idx)];
        if (is_correct(p.prediction, it->second->target)) {
            ++correct[static_cast<std::size_t>(idx)];
        }
    }
    std::vector<BucketRow> rows;
    rows.reserve(10);
    for (int i = 0; i < 10; ++i) {
        BucketRow row;
        row.bucket = i + 1;
        row.lo = i / 10.0;
        row.hi = (i + 1) / 10.0;
        row.n = n[static_cast<std::size_t>(i)];
        if (row.n > 0) {
            row.pct_correct = round2(100.0 * static_cast<double>(correct[static_cast<std::size_t>(i)]) /
                                     static_cast<double>(row.n));
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<PredictionRecord> ensemble_select(
    const std::vector<std::pair<std::string, std::vector<PredictionRecord>>>& per_model_preds) {
    if (per_model_preds.empty()) return {};

    // Instance order follows the first model's prediction list.
    std::vector<std::string> instance_order;
    std::vector<std::unordered_map<std::string, const PredictionRecord*>> by_model;
    for (std::size_t m = 0; m < per_model_preds.size(); ++m) {
        std::unordered_map<std::string, const PredictionRecord*> index;
        for (const auto& p : per_model_preds[m].second) {
            index[p.instance_id] = &p;
            if (m == 0) instance_order.push_back(p.instance_id);
        }
        by_model.push_back(std::move(index));
    }

    std::vector<PredictionRecord> selected;
    selected.reserve(instance_order.size());
    for (const auto& id : instance_order) {
        const PredictionRecord* best = nullptr;
        std::string best_model;
        for (std::size_t m = 0; m < per_model_preds.size(); ++m) {
            auto it = by_model[m].find(id);
            if (it == by_model[m].end()) {
                throw CoverageGap(per_model_preds[m].first, id);
            }
            if (best == nullptr || it->second->log_likelihood > best->log_likelihood) {
                best = it->second;
                best_model = per_model_preds[m].first;
            }
        }
        PredictionRecord pick = *best;
        pick.model_name = best_model;
        selected.push_back(std::move(pick));
    }
    return selected;
}

EvalReport build_report(
    std::span<const data::DatasetRow> dataset,
    const std::vector<std::pair<std::string, std::vector<PredictionRecord>>>& per_model_preds,
    const std::string& baseline_name, bool include_ensemble) {
    EvalReport report;
    report.baseline = baseline_name;

    std::map<std::string, std::set<std::string>> corrects;
    std::set<std::string> universe;
    for (const auto& row : dataset) universe.insert(row.instance_id);

    bool baseline_found = false;
    for (const auto& [model, preds] : per_model_preds) {
        corrects[model] = correct_set(preds, dataset);
        report.accuracies.push_back(ModelAccuracyRow{model, accuracy(preds, dataset)});
        report.buckets.emplace_back(model, bucket_by_confidence(preds, dataset));
        baseline_found = baseline_found || model == baseline_name;
    }
    if (!baseline_found) {
        throw Error("baseline model '" + baseline_name + "' not among the prediction sets");
    }

    const auto& base_correct = corrects.at(baseline_name);
    std::vector<double> raw_p;
    for (const auto& [model, preds] : per_model_preds) {
        if (model == baseline_name) continue;
        PairwiseRow row;
        row.model = model;
        row.test = mcnemar_test(base_correct, corrects.at(model), universe);
        report.pairwise.push_back(row);
        raw_p.push_back(row.test.p_value);

        ComplementarityRow comp;
        comp.model = model;
        comp.values = complementarity(base_correct, corrects.at(model));
        report.complementarity.push_back(comp);
    }
    const auto adjusted = holm_adjust(raw_p);
    for (std::size_t i = 0; i < adjusted.size(); ++i) {
        report.pairwise[i].holm_p = adjusted[i];
    }

    if (include_ensemble && per_model_preds.size() > 1) {
        const auto selected = ensemble_select(per_model_preds);
        report.ensemble = ModelAccuracyRow{"confidence_ensemble", accuracy(selected, dataset)};
    }
    return report;
}

std::string render_text(const EvalReport& report) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << "== Correct predictions ==\n";
    for (const auto& row : report.accuracies) {
        os << "  " << row.model << ": " << row.accuracy.correct << "/" << row.accuracy.total
           << " (" << row.accuracy.percent << "%)"
           << (row.model == report.baseline ? "  [baseline]" : "") << "\n";
    }
    if (report.ensemble) {
        os << "  " << report.ensemble->model << ": " << report.ensemble->accuracy.correct << "/"
           << report.ensemble->accuracy.total << " (" << report.ensemble->accuracy.percent
           << "%)\n";
    }
    if (!report.pairwise.empty()) {
        os << "== McNemar vs " << report.baseline << " (Holm-adjusted) ==\n";
        for (const auto& row : report.pairwise) {
            os << "  " << row.model << ": b=" << row.test.b << " c=" << row.test.c << " p="
               << row.test.p_value << " holm_p=" << row.holm_p << " OR=";
            if (row.test.degenerate) {
                os << "NaN (degenerate)";
            } else {
                os << row.test.odds_ratio;
            }
            os << (row.test.method == McNemarResult::Method::ChiSquareCC ? "  [chi2-cc]"
                                                                         : "  [exact]")
               << "\n";
        }
        os << "== Complementarity vs " << report.baseline << " ==\n";
        for (const auto& row : report.complementarity) {
            os << "  " << row.model << ": shared=" << row.values.shared_pct
               << "% only_" << report.baseline << "=" << row.values.only_a_pct << "% only_"
               << row.model << "=" << row.values.only_b_pct << "% (union "
               << row.values.union_size << ")\n";
        }
    }
    os << "== Confidence buckets ==\n";
    for (const auto& [model, rows] : report.buckets) {
        os << "  " << model << ":";
        for (const auto& row : rows) {
            os << " [" << row.lo << "-" << row.hi << "] n=" << row.n << " "
               << format_pct(row.pct_correct) << "%";
        }
        os << "\n";
    }
    return os.str();
}

std::string render_json(const EvalReport& report) {
    nlohmann::json j;
    j["baseline"] = report.baseline;
    for (const auto& row : report.accuracies) {
        j["accuracy"][row.model] = {{"correct", row.accuracy.correct},
                                    {"total", row.accuracy.total},
                                    {"percent", row.accuracy.percent}};
    }
    for (const auto& row : report.pairwise) {
        nlohmann::json t;
        t["model"] = row.model;
        t["b"] = row.test.b;
        t["c"] = row.test.c;
        t["statistic"] = row.test.statistic;
        t["p_value"] = row.test.p_value;
        t["holm_p"] = row.holm_p;
        t["odds_ratio"] = row.test.degenerate ? nlohmann::json(nullptr)
                          : std::isinf(row.test.odds_ratio)
                              ? nlohmann::json("inf")
                              : nlohmann::json(row.test.odds_ratio);
        t["method"] = row.test.method == McNemarResult::Method::ChiSquareCC ? "chi_square_cc"
                                                                            : "exact_binomial";
        t["degenerate"] = row.test.degenerate;
        j["mcnemar"].push_back(t);
    }
    for (const auto& row : report.complementarity) {
        j["complementarity"].push_back({{"model", row.model},
                                        {"shared_pct", row.values.shared_pct},
                                        {"only_baseline_pct", row.values.only_a_pct},
                                        {"only_model_pct", row.values.only_b_pct},
                                        {"union", row.values.union_size}});
    }
    for (const auto& [model, rows] : report.buckets) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& row : rows) {
            arr.push_back({{"bucket", row.bucket},
                           {"lo", row.lo},
                           {"hi", row.hi},
                           {"n", row.n},
                           {"pct_correct", row.pct_correct ? nlohmann::json(*row.pct_correct)
                                                           : nlohmann::json(nullptr)}});
        }
        j["buckets"][model] = std::move(arr);
    }
    if (report.ensemble) {
        j["ensemble"] = {{"model", report.ensemble->model},
                         {"correct", report.ensemble->accuracy.correct},
                         {"total", report.ensemble->accuracy.total},
                         {"percent", report.ensemble->accuracy.percent}};
    }
    return j.dump(2);
}

std::string render_buckets_csv(const EvalReport& report) {
    std::ostringstream os;
    os << "model,bucket,lo,hi,n,pct_correct\n";
    os.setf(std::ios::fixed);
    os.precision(2);
    for (const auto& [model, rows] : report.buckets) {
        for (const auto& row : rows) {
            os << model << "," << row.bucket << "," << row.lo << "," << row.hi << "," << row.n
               << "," << format_pct(row.pct_correct) << "\n";
        }
    }
    return os.str();
}

}  // namespace ctxmine::eval
