#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "macfe/causal.hpp"
#include "macfe/dataset.hpp"
#include "macfe/mic.hpp"
#include "macfe/transforms.hpp"
#include "macfe/trm.hpp"

namespace macfe {

struct PipelineConfig {
    int depth = 2;             // rounds of unary+binary generation
    double s_select = 0.8;     // causal selection fraction (0,1]
    double tau = 0.5;          // similarity threshold
    double cap_factor = 2.0;   // generated columns <= ceil(cap_factor * n_original)
    double gamma = 0.05;       // outlier threshold (kept with the config surface)
    int bins = 10;             // histogram bins; must match the TRM fingerprint
    std::uint64_t seed = 0;
    int threads = 1;
    MicConfig mic;
    DagOptions dag;
};

struct GeneratedColumn {
    TransformExpr expr;
    std::vector<double> values;  // pre-scaling
    double similarity = 0.0;     // similarity of the lookup that produced the top-level op
    int round = 0;
};

// Result of transform_dataset: the fitted recipe plus its materialized
// output. Generated values are stored pre-scaling; scaled_columns() applies
// the fitted scaler.
struct EngineeredDataset {
    Dataset base;                        // selected original columns (+ labels)
    std::vector<std::size_t> selected;   // original feature indices, ascending
    std::vector<GeneratedColumn> generated;
    ScalerParams scaler;                 // fitted on this data
    std::vector<std::string> notes;      // e.g. generation-cap warnings
    std::size_t original_feature_count = 0;

    std::vector<std::string> column_names() const;           // originals then expressions
    std::vector<std::vector<double>> unscaled_columns() const;
    std::vector<std::vector<double>> scaled_columns() const;
};

// Alg.-style end-to-end transformation: causal pre-selection, depth rounds of
// TRM-guided unary then binary generation with dedup and cap, final scaler
// lookup and fit. Deterministic for fixed inputs.
EngineeredDataset transform_dataset(const Dataset& d, const Trm& trm, const PipelineConfig& cfg);

// Accepts unless the candidate is constant, an exact value-duplicate of an
// existing column, or |Pearson r| > 0.999 with one.
bool dedup_accept(std::span<const double> candidate,
                  const std::vector<std::vector<double>>& existing);

// Re-applies a fitted recipe to new rows of the same original layout:
// restricts to the selected originals, evaluates every stored expression,
// then applies the stored scaler parameters. Returns scaled columns.
std::vector<std::vector<double>> apply_plan(const EngineeredDataset& plan, const Dataset& fresh);

std::string lineage_json(const EngineeredDataset& e, const PipelineConfig& cfg);
void write_engineered_csv(const EngineeredDataset& e, const std::filesystem::path& path);

}  // namespace macfe
