#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "macfe/dataset.hpp"
#include "macfe/diag.hpp"
#include "macfe/pipeline.hpp"
#include "macfe/trm.hpp"

namespace macfe {

enum class ClassifierId { knn5, logreg, gnb };

const std::vector<ClassifierId>& all_classifiers();
std::string_view classifier_name(ClassifierId id);

// Mean stratified k-fold CV accuracy of one built-in classifier on the
// dataset as given. Deterministic for a fixed seed.
double evaluate(const Dataset& d, ClassifierId clf, int k, std::uint64_t seed);

struct EvalEntry {
    ClassifierId clf;
    double acc_original = 0.0;
    double acc_engineered = 0.0;
    double delta = 0.0;
};

struct EvalReport {
    std::string dataset;
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<EvalEntry> entries;
    bool improved_any = false;
};

// Original vs engineered CV accuracy for every built-in classifier.
// Engineering happens inside each fold: imputation, causal selection, TRM
// lookups and scaler fitting all see training rows only; the fitted recipe is
// then re-applied to the test rows. Takes the dataset as loaded (raw).
EvalReport compare(const Dataset& raw, const Trm& trm, const PipelineConfig& cfg, int k,
                   std::uint64_t seed);

std::string render_table(const EvalReport& report);
std::string report_json(const EvalReport& report);

}  // namespace macfe
