#pragma once

#include <span>
#include <vector>

namespace macfe {

struct MicConfig {
    double alpha = 0.6;  // grid budget exponent, B(n) = max(4, n^alpha)
    int c = 15;          // candidate-clump expansion factor
};

// Maximal Information Coefficient in [0,1]. Equipartitions one axis,
// optimizes the other by dynamic programming over clump boundaries, evaluates
// both orientations and takes the max. Constant input gives 0. Depends only
// on ranks, so strictly increasing maps of either variable leave the score
// bit-identical.
double mic(std::span<const double> x, std::span<const double> y, const MicConfig& cfg = {});
double mic(std::span<const double> x, std::span<const int> labels, const MicConfig& cfg = {});

// Exact maximum over every grid placement within the budget. Exponential in
// n; rejects n > 12.
double mic_exact_oracle(std::span<const double> x, std::span<const double> y,
                        const MicConfig& cfg = {});

// MIC(t_out, labels) - MIC(x, labels); may be negative.
double mic_gain(std::span<const double> t_out, std::span<const double> x,
                std::span<const int> labels, const MicConfig& cfg = {});

}  // namespace macfe
