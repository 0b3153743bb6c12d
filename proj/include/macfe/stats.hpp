#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace macfe {

// Sum of the given terms accumulated in ascending order; bit-identical for
// any permutation of the same multiset.
double sum_invariant(std::vector<double> terms);

double mean(std::span<const double> x);
// Population variance (divide by n).
double variance(std::span<const double> x);
double stddev(std::span<const double> x);
// Standardized third moment; 0 for (near-)constant input.
double skewness(std::span<const double> x);
// Excess kurtosis (m4/m2^2 - 3); 0 for (near-)constant input.
double excess_kurtosis(std::span<const double> x);
// Pearson correlation; 0 when either side is (near-)constant.
double pearson(std::span<const double> x, std::span<const double> y);

// Linear-interpolation quantile over order statistics (R type 7).
// p in [0,1]; input need not be sorted.
double quantile_type7(std::span<const double> x, double p);
double quantile_type7_sorted(std::span<const double> sorted, double p);
double median(std::span<const double> x);

// Shannon entropy (nats) of a probability vector; 0·log 0 = 0.
double entropy_nats(std::span<const double> probs);

// Entropy (nats) of label counts.
double label_entropy_nats(std::span<const std::size_t> counts);

// FNV-1a 64-bit hash, used for file checksums.
std::uint64_t fnv1a64(std::span<const char> bytes);

// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);
// Strict full-token parse; throws Errc::parse_error on failure.
double parse_double_strict(const std::string& token);
// Non-throwing full-token parse of a finite double.
bool try_parse_double(const std::string& token, double& out);

}  // namespace macfe
