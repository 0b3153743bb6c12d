#include "macfe/scaler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "macfe/error.hpp"
#include "macfe/rng.hpp"
#include "macfe/stats.hpp"

namespace macfe {

namespace {

constexpr std::size_t kShapiroMaxN = 5000;
constexpr std::uint64_t kSubsampleSeed = 0x5157u;  // fixed: results must not drift

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double poly(const double* coef, int order, double v) {
    // coef[0] + coef[1] v + ... + coef[order-1] v^(order-1)
    double acc = coef[order - 1];
    for (int i = order - 2; i >= 0; --i) acc = acc * v + coef[i];
    return acc;
}

}  // namespace

// Wichura's AS 241 rational approximation (PPND16), accurate to ~1e-16.
double inverse_normal_cdf(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        raise(Errc::invalid_argument, "inverse_normal_cdf needs p in (0,1)");
    }
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        val = num / den;
    }
    return q < 0.0 ? -val : val;
}

double outlier_proportion(const std::vector<std::vector<double>>& columns) {
    if (columns.empty() || columns[0].empty()) {
        raise(Errc::empty_feature, "outlier_proportion of empty matrix");
    }
    std::size_t outliers = 0;
    std::size_t total = 0;
    for (const auto& col : columns) {
        total += col.size();
        std::vector<double> sorted(col);
        std::sort(sorted.begin(), sorted.end());
        const double q1 = quantile_type7_sorted(sorted, 0.25);
        const double q3 = quantile_type7_sorted(sorted, 0.75);
        const double iqr = q3 - q1;
        const double lo = q1 - 1.5 * iqr;
        const double hi = q3 + 1.5 * iqr;
        for (double v : col) {
            if (v < lo || v > hi) outliers++;
        }
    }
    return static_cast<double>(outliers) / static_cast<double>(total);
}

double outlier_proportion(const Dataset& d) { return outlier_proportion(d.x); }

// Royston's AS R94 approximation of the Shapiro-Wilk W statistic and its
// upper-tail p-value.
ShapiroResult shapiro_wilk(std::span<const double> x) {
    std::vector<double> sample(x.begin(), x.end());
    if (sample.size() < 3) {
        raise(Errc::too_few_samples, "shapiro_wilk needs at least 3 samples");
    }
    if (sample.size() > kShapiroMaxN) {
        Rng rng(kSubsampleSeed);
        // partial Fisher-Yates: first kShapiroMaxN entries form the subsample
        for (std::size_t i = 0; i < kShapiroMaxN; ++i) {
            const std::size_t j = i + rng.index(sample.size() - i);
            std::swap(sample[i], sample[j]);
        }
        sample.resize(kShapiroMaxN);
    }
    std::sort(sample.begin(), sample.end());
    const std::size_t n = sample.size();
    const double dn = static_cast<double>(n);

    if (!(sample.back() - sample.front() > 0.0)) {
        raise(Errc::degenerate_sample, "shapiro_wilk sample has zero range");
    }

    // expected normal order statistics (Blom scores)
    std::vector<double> m(n);
    double ssq_m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = inverse_normal_cdf((static_cast<double>(i + 1) - 0.375) / (dn + 0.25));
        ssq_m += m[i] * m[i];
    }

    std::vector<double> a(n, 0.0);
    const double rsn = 1.0 / std::sqrt(dn);
    if (n == 3) {
        a[0] = -std::numbers::sqrt2 / 2.0;
        a[2] = -a[0];
    } else {
        static constexpr double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
        static constexpr double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
        const double norm_m = std::sqrt(ssq_m);
        const double a_n = poly(c1, 6, rsn) + m[n - 1] / norm_m;
        std::size_t i1;
        double phi;
        if (n <= 5) {
            i1 = 1;
            phi = (ssq_m - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * a_n * a_n);
            a[n - 1] = a_n;
        } else {
            const double a_n1 = poly(c2, 6, rsn) + m[n - 2] / norm_m;
            i1 = 2;
            phi = (ssq_m - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
                  (1.0 - 2.0 * a_n * a_n - 2.0 * a_n1 * a_n1);
            a[n - 1] = a_n;
            a[n - 2] = a_n1;
            a[1] = -a_n1;
        }
        a[0] = -a_n;
        const double sqrt_phi = std::sqrt(phi);
        for (std::size_t i = i1; i < n - i1; ++i) a[i] = m[i] / sqrt_phi;
    }

    const double xbar = mean(sample);
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        numerator += a[i] * sample[i];
        denominator += (sample[i] - xbar) * (sample[i] - xbar);
    }
    if (!(denominator > 0.0)) {
        raise(Errc::degenerate_sample, "shapiro_wilk sample has zero variance");
    }
    double w = numerator * numerator / denominator;
    w = std::min(w, 1.0);

    double p;
    if (n == 3) {
        const double pi6 = 6.0 / std::numbers::pi;
        const double stqr = std::asin(std::sqrt(0.75));
        p = pi6 * (std::asin(std::sqrt(w)) - stqr);
        p = std::clamp(p, 0.0, 1.0);
    } else {
        const double one_minus_w = 1.0 - w;
        if (one_minus_w < 1e-99) {
            p = 1.0;
        } else if (n <= 11) {
            const double g = -2.273 + 0.459 * dn;
            const double arg = g - std::log(one_minus_w);
            if (arg <= 0.0) {
                p = 1.0;
            } else {
                const double z_stat = -std::log(arg);
                const double mu = 0.5440 + dn * (-0.39978 + dn * (0.025054 + dn * -6.714e-4));
                const double sigma =
                    std::exp(1.3822 + dn * (-0.77857 + dn * (0.062767 + dn * -0.0020322)));
                p = 1.0 - normal_cdf((z_stat - mu) / sigma);
            }
        } else {
            const double u = std::log(dn);
            const double z_stat = std::log(one_minus_w);
            const double mu = -1.5861 + u * (-0.31082 + u * (-0.083751 + u * 0.0038915));
            const double sigma = std::exp(-0.4803 + u * (-0.082676 + u * 0.0030302));
            p = 1.0 - normal_cdf((z_stat - mu) / sigma);
        }
    }
    return {w, p};
}

ScalerDecision recommend_scaler(const Dataset& d, double gamma) {
    if (!(gamma >= 0.0) || gamma > 1.0) {
        raise(Errc::bad_threshold, "gamma must lie in [0,1]");
    }
    if (!d.preprocessed) {
        raise(Errc::invalid_argument, "recommend_scaler requires a preprocessed dataset");
    }
    ScalerDecision decision;
    decision.outlier_fraction = outlier_proportion(d);
    if (decision.outlier_fraction > gamma) {
        decision.choice = make_transform(TransformKind::scaler, "robust");
        return decision;
    }
    std::vector<double> pvals;
    pvals.reserve(d.n_features());
    for (const auto& col : d.x) {
        double p = 0.0;  // degenerate or too-short columns count as non-normal
        try {
            p = shapiro_wilk(col).p;
        } catch (const Error& e) {
            if (e.code() != Errc::degenerate_sample && e.code() != Errc::too_few_samples) throw;
        }
        pvals.push_back(p);
    }
    decision.sw_p = median(pvals);
    decision.choice = *decision.sw_p > 0.05
                          ? make_transform(TransformKind::scaler, "standard")
                          : make_transform(TransformKind::scaler, "minmax");
    return decision;
}

}  // namespace macfe
