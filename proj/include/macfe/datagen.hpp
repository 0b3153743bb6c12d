#pragma once

#include <cstdint>
#include <filesystem>

#include "macfe/causal.hpp"
#include "macfe/dataset.hpp"

namespace macfe::datagen {

// Deterministic synthetic datasets used by the bundled corpus, the bundled
// evaluation CSVs and the test suites. All randomness flows from the seed.

// y = (x1 * x2 > 0); extra independent noise features.
Dataset product_sign(std::string name, std::size_t n, std::size_t noise_features,
                     std::uint64_t seed);

// y = parity of the fold band of |x1| (8 bands over (-1,1)); one noise feature.
Dataset folded_bands(std::string name, std::size_t n, std::uint64_t seed);

// Log-additive plant: positive heavy-tailed features, y = (x1 * x2 > 1).
Dataset log_ratio(std::string name, std::size_t n, std::size_t noise_features,
                  std::uint64_t seed);

// Gaussian features with a fraction of cells replaced by far outliers;
// y = (x1 + noise > 0).
Dataset outlier_heavy(std::string name, std::size_t n, std::size_t features,
                      double outlier_fraction, std::uint64_t seed);

// Standard-normal features, linear decision rule with label noise.
Dataset gaussian_linear(std::string name, std::size_t n, std::size_t features,
                        std::uint64_t seed);

// Uniform(0,1) features, y = (x1 * x2 > threshold).
Dataset uniform_product(std::string name, std::size_t n, std::size_t features, double threshold,
                        std::uint64_t seed);

// Linear SEM over five feature nodes plus a sink target; returns the dataset
// and the ground-truth adjacency (entry (i,j) = weight of i -> j, target last).
struct SemSample {
    Dataset data;
    Mat truth;
    std::size_t top_feature = 0;  // feature with the largest direct effect on the target
};

SemSample linear_sem(std::string name, std::size_t n, std::uint64_t seed);

// RFC-4180 CSV with header; full-precision numbers; target column last.
void write_csv(const Dataset& d, const std::filesystem::path& path);

}  // namespace macfe::datagen
