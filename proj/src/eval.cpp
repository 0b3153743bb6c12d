#include "macfe/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>

#include "macfe/error.hpp"
#include "macfe/parallel.hpp"
#include "macfe/stats.hpp"

#include "json.hpp"

namespace macfe {

namespace diag {

namespace {
std::mutex log_mutex;
bool log_enabled = false;
std::vector<std::size_t> rows_log;
}  // namespace

void enable_fit_log(bool on) {
    std::lock_guard lock(log_mutex);
    log_enabled = on;
}

void clear_fit_log() {
    std::lock_guard lock(log_mutex);
    rows_log.clear();
}

std::vector<std::size_t> fit_log() {
    std::lock_guard lock(log_mutex);
    return rows_log;
}

void log_fit_rows(std::size_t rows) {
    std::lock_guard lock(log_mutex);
    if (log_enabled) rows_log.push_back(rows);
}

}  // namespace diag

namespace {

using Matrix = std::vector<std::vector<double>>;  // column-major

struct Standardizer {
    std::vector<double> mu;
    std::vector<double> sd;

    static Standardizer fit(const Matrix& cols) {
        Standardizer s;
        s.mu.reserve(cols.size());
        s.sd.reserve(cols.size());
        for (const auto& c : cols) {
            s.mu.push_back(mean(c));
            s.sd.push_back(stddev(c));
        }
        return s;
    }

    Matrix apply(const Matrix& cols) const {
        Matrix out(cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out[j].resize(cols[j].size());
            for (std::size_t i = 0; i < cols[j].size(); ++i) {
                out[j][i] = sd[j] > 0.0 ? (cols[j][i] - mu[j]) / sd[j] : 0.0;
            }
        }
        return out;
    }
};

std::size_t rows_of(const Matrix& cols) { return cols.empty() ? 0 : cols[0].size(); }

// ---- k-nearest neighbors (k = 5, Euclidean, distance ties by lower train index) ----

struct Knn {
    const Matrix* train;
    const std::vector<int>* labels;
    std::size_t m;

    int predict(const Matrix& test, std::size_t row) const {
        const std::size_t n_train = rows_of(*train);
        const std::size_t k = std::min<std::size_t>(5, n_train);
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(n_train);
        for (std::size_t t = 0; t < n_train; ++t) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < train->size(); ++j) {
                const double diff = (*train)[j][t] - test[j][row];
                d2 += diff * diff;
            }
            dist.emplace_back(d2, t);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::vector<std::size_t> votes(m, 0);
        for (std::size_t i = 0; i < k; ++i) {
            votes[static_cast<std::size_t>((*labels)[dist[i].second])]++;
        }
        // majority; vote ties go to the smallest class id
        std::size_t best = 0;
        for (std::size_t c = 1; c < m; ++c) {
            if (votes[c] > votes[best]) best = c;
        }
        return static_cast<int>(best);
    }
};

// ---- multinomial logistic regression (full-batch GD, 500 epochs, lr 0.1, l2 1e-4) ----

struct LogReg {
    Standardizer scaler;
    std::vector<double> w;  // m x (f+1), bias last
    std::size_t m = 0;
    std::size_t f = 0;

    static LogReg fit(const Matrix& cols, const std::vector<int>& y, std::size_t m) {
        constexpr int kEpochs = 500;
        constexpr double kLr = 0.1;
        constexpr double kL2 = 1e-4;

        LogReg model;
        model.m = m;
        model.f = cols.size();
        model.scaler = Standardizer::fit(cols);
        const Matrix z = model.scaler.apply(cols);
        const std::size_t n = rows_of(cols);
        const std::size_t stride = model.f + 1;
        model.w.assign(m * stride, 0.0);

        std::vector<double> logits(m), probs(m), grad(m * stride);
        for (int epoch = 0; epoch < kEpochs; ++epoch) {
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                double peak = -std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < m; ++c) {
                    double v = model.w[c * stride + model.f];
                    for (std::size_t j = 0; j < model.f; ++j) {
                        v += model.w[c * stride + j] * z[j][i];
                    }
                    logits[c] = v;
                    peak = std::max(peak, v);
                }
                double total = 0.0;
                for (std::size_t c = 0; c < m; ++c) {
                    probs[c] = std::exp(logits[c] - peak);
                    total += probs[c];
                }
                for (std::size_t c = 0; c < m; ++c) {
                    const double err =
                        probs[c] / total - (static_cast<std::size_t>(y[i]) == c ? 1.0 : 0.0);
                    for (std::size_t j = 0; j < model.f; ++j) {
                        grad[c * stride + j] += err * z[j][i];
                    }
                    grad[c * stride + model.f] += err;
                }
            }
            const double inv_n = 1.0 / static_cast<double>(n);
            for (std::size_t c = 0; c < m; ++c) {
                for (std::size_t j = 0; j < stride; ++j) {
                    double g = grad[c * stride + j] * inv_n;
                    if (j < model.f) g += kL2 * model.w[c * stride + j];  // bias unpenalized
                    model.w[c * stride + j] -= kLr * g;
                }
            }
        }
        return model;
    }

    int predict(const Matrix& test_scaled, std::size_t row) const {
        const std::size_t stride = f + 1;
        std::size_t best = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < m; ++c) {
            double v = w[c * stride + f];
            for (std::size_t j = 0; j < f; ++j) v += w[c * stride + j] * test_scaled[j][row];
            if (v > best_v) {
                best_v = v;
                best = c;
            }
        }
        return static_cast<int>(best);
    }
};

// ---- Gaussian naive Bayes (variance floor 1e-9) ----

struct Gnb {
    std::vector<double> log_prior;          // m
    std::vector<std::vector<double>> mu;    // m x f
    std::vector<std::vector<double>> var;   // m x f
    std::size_t m = 0;
    std::size_t f = 0;

    static Gnb fit(const Matrix& cols, const std::vector<int>& y, std::size_t m) {
        constexpr double kVarFloor = 1e-9;
        Gnb model;
        model.m = m;
        model.f = cols.size();
        const std::size_t n = rows_of(cols);
        std::vector<std::size_t> counts(m, 0);
        for (int label : y) counts[static_cast<std::size_t>(label)]++;
        model.log_prior.resize(m);
        model.mu.assign(m, std::vector<double>(model.f, 0.0));
        model.var.assign(m, std::vector<double>(model.f, 0.0));
        for (std::size_t c = 0; c < m; ++c) {
            model.log_prior[c] =
                counts[c] > 0
                    ? std::log(static_cast<double>(counts[c]) / static_cast<double>(n))
                    : -1e30;
        }
        for (std::size_t j = 0; j < model.f; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                model.mu[static_cast<std::size_t>(y[i])][j] += cols[j][i];
            }
            for (std::size_t c = 0; c < m; ++c) {
                if (counts[c] > 0) model.mu[c][j] /= static_cast<double>(counts[c]);
            }
            for (std::size_t i = 0; i < n; ++i) {
                const auto c = static_cast<std::size_t>(y[i]);
                const double d = cols[j][i] - model.mu[c][j];
                model.var[c][j] += d * d;
            }
            for (std::size_t c = 0; c < m; ++c) {
                if (counts[c] > 0) model.var[c][j] /= static_cast<double>(counts[c]);
                model.var[c][j] = std::max(model.var[c][j], kVarFloor);
            }
        }
        return model;
    }

    int predict(const Matrix& test, std::size_t row) const {
        std::size_t best = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < m; ++c) {
            double v = log_prior[c];
            for (std::size_t j = 0; j < f; ++j) {
                const double d = test[j][row] - mu[c][j];
                v += -0.5 * std::log(6.283185307179586 * var[c][j]) - d * d / (2.0 * var[c][j]);
            }
            if (v > best_v) {
                best_v = v;
                best = c;
            }
        }
        return static_cast<int>(best);
    }
};

double fold_accuracy(ClassifierId clf, const Matrix& train, const std::vector<int>& train_y,
                     const Matrix& test, const std::vector<int>& test_y, std::size_t m) {
    diag::log_fit_rows(rows_of(train));
    std::vector<int> predicted(test_y.size());
    switch (clf) {
        case ClassifierId::knn5: {
            Knn model{&train, &train_y, m};
            for (std::size_t i = 0; i < test_y.size(); ++i) predicted[i] = model.predict(test, i);
            break;
        }
        case ClassifierId::logreg: {
            const LogReg model = LogReg::fit(train, train_y, m);
            const Matrix scaled = model.scaler.apply(test);
            for (std::size_t i = 0; i < test_y.size(); ++i) {
                predicted[i] = model.predict(scaled, i);
            }
            break;
        }
        case ClassifierId::gnb: {
            const Gnb model = Gnb::fit(train, train_y, m);
            for (std::size_t i = 0; i < test_y.size(); ++i) predicted[i] = model.predict(test, i);
            break;
        }
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_y.size(); ++i) {
        if (predicted[i] == test_y[i]) correct++;
    }
    return static_cast<double>(correct) / static_cast<double>(test_y.size());
}

std::vector<std::size_t> complement_rows(const FoldPlan& plan, std::size_t fold,
                                         std::size_t n_rows) {
    std::vector<bool> in_fold(n_rows, false);
    for (std::size_t r : plan.folds[fold]) in_fold[r] = true;
    std::vector<std::size_t> rows;
    rows.reserve(n_rows - plan.folds[fold].size());
    for (std::size_t r = 0; r < n_rows; ++r) {
        if (!in_fold[r]) rows.push_back(r);
    }
    return rows;
}

}  // namespace

const std::vector<ClassifierId>& all_classifiers() {
    static const std::vector<ClassifierId> ids = {ClassifierId::knn5, ClassifierId::logreg,
                                                  ClassifierId::gnb};
    return ids;
}

std::string_view classifier_name(ClassifierId id) {
    switch (id) {
        case ClassifierId::knn5: return "knn5";
        case ClassifierId::logreg: return "logreg";
        case ClassifierId::gnb: return "gnb";
    }
    return "?";
}

double evaluate(const Dataset& d, ClassifierId clf, int k, std::uint64_t seed) {
    const FoldPlan plan = stratified_folds(d, k, seed);
    double total = 0.0;
    for (std::size_t fold = 0; fold < plan.folds.size(); ++fold) {
        const auto train_rows = complement_rows(plan, fold, d.n_instances());
        const Dataset train = subset_rows(d, train_rows);
        const Dataset test = subset_rows(d, plan.folds[fold]);
        total += fold_accuracy(clf, train.x, train.y, test.x, test.y, d.n_classes());
    }
    return total / static_cast<double>(plan.folds.size());
}

EvalReport compare(const Dataset& raw, const Trm& trm, const PipelineConfig& cfg, int k,
                   std::uint64_t seed) {
    const FoldPlan plan = stratified_folds(raw, k, seed);
    const std::size_t m = raw.n_classes();
    const auto& clfs = all_classifiers();

    struct FoldResult {
        std::vector<double> original;    // per classifier
        std::vector<double> engineered;  // per classifier
    };
    std::vector<FoldResult> results(plan.folds.size());

    parallel_for(plan.folds.size(), cfg.threads, [&](std::size_t fold) {
        const auto train_rows = complement_rows(plan, fold, raw.n_instances());
        const Dataset train_raw = subset_rows(raw, train_rows);
        const Dataset test_raw = subset_rows(raw, plan.folds[fold]);

        // imputation fitted on the training fold only
        auto [train_pp, pp_model] = preprocess_fit(train_raw);
        diag::log_fit_rows(train_pp.n_instances());
        const Dataset test_pp = preprocess_apply(pp_model, test_raw);

        const EngineeredDataset plan_fit = transform_dataset(train_pp, trm, cfg);
        const Matrix train_eng = plan_fit.scaled_columns();
        const Matrix test_eng = apply_plan(plan_fit, test_pp);

        auto& slot = results[fold];
        slot.original.resize(clfs.size());
        slot.engineered.resize(clfs.size());
        for (std::size_t ci = 0; ci < clfs.size(); ++ci) {
            slot.original[ci] =
                fold_accuracy(clfs[ci], train_pp.x, train_pp.y, test_pp.x, test_pp.y, m);
            slot.engineered[ci] =
                fold_accuracy(clfs[ci], train_eng, train_pp.y, test_eng, test_pp.y, m);
        }
    });

    EvalReport report;
    report.dataset = raw.name;
    report.k = k;
    report.seed = seed;
    for (std::size_t ci = 0; ci < clfs.size(); ++ci) {
        EvalEntry entry;
        entry.clf = clfs[ci];
        for (const auto& r : results) {
            entry.acc_original += r.original[ci];
            entry.acc_engineered += r.engineered[ci];
        }
        entry.acc_original /= static_cast<double>(results.size());
        entry.acc_engineered /= static_cast<double>(results.size());
        entry.delta = entry.acc_engineered - entry.acc_original;
        report.improved_any = report.improved_any || entry.delta > 0.0;
        report.entries.push_back(entry);
    }
    return report;
}

std::string render_table(const EvalReport& report) {
    char line[160];
    std::string out;
    std::snprintf(line, sizeof(line), "dataset: %s  (k=%d, seed=%llu)\n", report.dataset.c_str(),
                  report.k, static_cast<unsigned long long>(report.seed));
    out += line;
    std::snprintf(line, sizeof(line), "%-10s %12s %12s %12s\n", "classifier", "original",
                  "engineered", "delta");
    out += line;
    for (const auto& e : report.entries) {
        std::snprintf(line, sizeof(line), "%-10s %12.6f %12.6f %+12.6f\n",
                      std::string(classifier_name(e.clf)).c_str(), e.acc_original,
                      e.acc_engineered, e.delta);
        out += line;
    }
    std::snprintf(line, sizeof(line), "improved_any: %s\n", report.improved_any ? "true" : "false");
    out += line;
    return out;
}

std::string report_json(const EvalReport& report) {
    nlohmann::ordered_json doc;
    doc["dataset"] = report.dataset;
    doc["k"] = report.k;
    doc["seed"] = report.seed;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& e : report.entries) {
        nlohmann::ordered_json item;
        item["classifier"] = std::string(classifier_name(e.clf));
        item["original"] = e.acc_original;
        item["engineered"] = e.acc_engineered;
        item["delta"] = e.delta;
        entries.push_back(std::move(item));
    }
    doc["results"] = std::move(entries);
    doc["improved_any"] = report.improved_any;
    return doc.dump(2);
}

}  // namespace macfe
