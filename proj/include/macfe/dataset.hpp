#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace macfe {

enum class ColumnKind { numeric, categorical };

struct ColumnInfo {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
};

// Tabular classification dataset. Columns are stored column-major; missing
// cells are NaN until preprocess() imputes them. Treated as immutable after
// construction; operations return new datasets.
struct Dataset {
    std::string name;
    std::vector<ColumnInfo> columns;        // feature descriptors (target excluded)
    std::vector<std::vector<double>> x;     // one vector per feature column
    std::vector<int> y;                     // class ids 0..m-1
    std::vector<std::string> label_names;   // id -> original token, first-appearance order
    std::string target_name;
    bool preprocessed = false;

    std::size_t n_instances() const { return y.size(); }
    std::size_t n_features() const { return columns.size(); }
    std::size_t n_classes() const { return label_names.size(); }
    std::vector<std::size_t> class_counts() const;
};

// Fitted preprocessing state, reusable on held-out rows.
struct PreprocessModel {
    std::vector<std::size_t> kept_columns;  // indices into the unpreprocessed layout
    std::vector<double> impute_means;       // one per kept column
};

struct FoldPlan {
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::size_t>> folds;  // disjoint, union = all rows
};

// RFC-4180-style CSV with a header row; empty string = missing cell.
// A column is numeric iff >= 99% of its non-empty cells parse as finite reals.
Dataset load_csv(const std::filesystem::path& path, const std::string& target);

// Drops non-numeric and all-missing columns, imputes remaining missing cells
// with the column mean of observed values. Idempotent.
Dataset preprocess(const Dataset& d);
std::pair<Dataset, PreprocessModel> preprocess_fit(const Dataset& d);
Dataset preprocess_apply(const PreprocessModel& model, const Dataset& d);

// Class proportions per fold deviate from the global ones by at most one
// instance per class. Deterministic for a fixed seed.
FoldPlan stratified_folds(const Dataset& d, int k, std::uint64_t seed);

// Row subset in the given order. Label table is preserved.
Dataset subset_rows(const Dataset& d, std::span<const std::size_t> rows);

// Builds an in-memory dataset; validates column/row alignment and m >= 2.
Dataset make_dataset(std::string name, std::vector<std::string> column_names,
                     std::vector<std::vector<double>> columns, std::vector<int> labels,
                     std::vector<std::string> label_names, std::string target_name,
                     bool preprocessed_flag);

}  // namespace macfe
