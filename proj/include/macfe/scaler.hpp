#pragma once

#include <optional>
#include <span>

#include "macfe/dataset.hpp"
#include "macfe/transforms.hpp"

namespace macfe {

// Fraction of cells outside the per-column Tukey fences
// [Q1 - 1.5 IQR, Q3 + 1.5 IQR] (type-7 quantiles). Constant columns
// contribute no outliers.
double outlier_proportion(const std::vector<std::vector<double>>& columns);
double outlier_proportion(const Dataset& d);

struct ShapiroResult {
    double w = 0.0;
    double p = 0.0;
};

// Shapiro-Wilk normality test, Royston's AS R94 approximation.
// 3 <= n; samples above 5000 are subsampled with a fixed internal seed.
// Zero-variance input raises Errc::degenerate_sample.
ShapiroResult shapiro_wilk(std::span<const double> x);

struct ScalerDecision {
    TransformId choice;                // scaler: robust | standard | minmax
    double outlier_fraction = 0.0;
    std::optional<double> sw_p;        // median per-column p; absent on the robust branch
};

// robust if outlier proportion > gamma; else standard if the median
// per-column Shapiro-Wilk p exceeds 0.05; else minmax.
ScalerDecision recommend_scaler(const Dataset& d, double gamma);

// AS 241 inverse normal CDF (PPND16); exposed for testing.
double inverse_normal_cdf(double p);

}  // namespace macfe
