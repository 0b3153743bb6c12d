#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "macfe/dataset.hpp"

namespace macfe {

inline constexpr std::size_t kMetaFeatureCount = 13;

// Fixed extraction order; index i of every MetaFeatureVector means the same thing.
const std::array<std::string_view, kMetaFeatureCount>& meta_feature_names();

struct MetaFeatureVector {
    std::array<double, kMetaFeatureCount> values{};
};

// Per-feature lookup key: dataset meta-features ++ normalized histogram.
struct FeatureEncoding {
    std::vector<double> values;  // length = kMetaFeatureCount + histogram_bins
    std::string dataset_name;
    std::string feature_name;
    int histogram_bins = 0;
};

// Dataset-level key (meta-feature vector alone), used for scaler lookup.
struct DatasetEncoding {
    std::array<double, kMetaFeatureCount> values{};
};

// d must be preprocessed. Degenerate statistics follow fixed conventions:
// skewness/kurtosis of a constant column are 0, correlations with a constant
// column are 0, a single-feature dataset has mean-|correlation| 0.
MetaFeatureVector extract_meta_features(const Dataset& d);

// s uniform-width bins over [min x, max x], final bin closed on the right,
// counts normalized by n. Constant input yields the all-zero vector.
std::vector<double> feature_histogram(std::span<const double> x, int s);

FeatureEncoding encode_feature(const Dataset& d, std::size_t feature_index, int bins);
// Variant reusing an already-extracted meta-feature vector (one per pipeline round).
FeatureEncoding encode_feature(const MetaFeatureVector& mf, std::span<const double> column,
                               std::string dataset_name, std::string feature_name, int bins);

DatasetEncoding encode_dataset(const Dataset& d);

}  // namespace macfe
