#include "macfe/meta_features.hpp"

#include <algorithm>
#include <cmath>

#include "macfe/error.hpp"
#include "macfe/stats.hpp"

namespace macfe {

namespace {

constexpr int kInternalBins = 10;  // fixed binning for the entropy/MI meta-features

// Bin index under the histogram rule: uniform widths, final bin closed on the
// right. Constant columns collapse to bin 0.
std::vector<int> bin_assign(std::span<const double> x, int s) {
    std::vector<int> bins(x.size(), 0);
    const auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *mn_it;
    const double w = (*mx_it - lo) / static_cast<double>(s);
    if (w <= 0.0) return bins;
    for (std::size_t i = 0; i < x.size(); ++i) {
        int b = static_cast<int>((x[i] - lo) / w);
        if (b >= s) b = s - 1;
        if (b < 0) b = 0;
        bins[i] = b;
    }
    return bins;
}

double feature_label_mi_nats(std::span<const double> x, std::span<const int> y, std::size_t m) {
    const auto bins = bin_assign(x, kInternalBins);
    const std::size_t n = x.size();
    std::vector<std::size_t> joint(kInternalBins * m, 0);
    std::vector<std::size_t> bc(kInternalBins, 0);
    std::vector<std::size_t> yc(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
        joint[static_cast<std::size_t>(bins[i]) * m + static_cast<std::size_t>(y[i])]++;
        bc[static_cast<std::size_t>(bins[i])]++;
        yc[static_cast<std::size_t>(y[i])]++;
    }
    double mi = 0.0;
    const double dn = static_cast<double>(n);
    for (int b = 0; b < kInternalBins; ++b) {
        for (std::size_t c = 0; c < m; ++c) {
            const std::size_t j = joint[static_cast<std::size_t>(b) * m + c];
            if (j == 0) continue;
            const double pj = static_cast<double>(j) / dn;
            mi += pj * std::log(pj * dn * dn /
                                (static_cast<double>(bc[static_cast<std::size_t>(b)]) *
                                 static_cast<double>(yc[c])));
        }
    }
    return std::max(mi, 0.0);
}

}  // namespace

const std::array<std::string_view, kMetaFeatureCount>& meta_feature_names() {
    static const std::array<std::string_view, kMetaFeatureCount> names = {
        "log10_instances",
        "log10_features",
        "n_classes",
        "feature_instance_ratio",
        "mean_feature_mean",
        "mean_feature_std",
        "mean_feature_skewness",
        "mean_feature_kurtosis",
        "mean_abs_correlation",
        "normalized_class_entropy",
        "mean_feature_entropy",
        "mean_feature_label_mi",
        "majority_class_fraction",
    };
    return names;
}

MetaFeatureVector extract_meta_features(const Dataset& d) {
    if (!d.preprocessed) {
        raise(Errc::invalid_argument, "extract_meta_features requires a preprocessed dataset");
    }
    const std::size_t n = d.n_instances();
    const std::size_t f = d.n_features();
    const std::size_t m = d.n_classes();
    const double df = static_cast<double>(f);

    MetaFeatureVector mf;
    mf.values[0] = std::log10(static_cast<double>(n));
    mf.values[1] = std::log10(df);
    mf.values[2] = static_cast<double>(m);
    mf.values[3] = df / static_cast<double>(n);

    // per-feature terms are reduced with an order-canonical sum, keeping the
    // aggregates bit-identical under feature-column permutations
    std::vector<double> means, stds, skews, kurts, entropies, mis;
    const auto counts = d.class_counts();
    const double hy = label_entropy_nats(counts);
    for (std::size_t j = 0; j < f; ++j) {
        const auto& col = d.x[j];
        means.push_back(mean(col));
        stds.push_back(stddev(col));
        skews.push_back(skewness(col));
        kurts.push_back(excess_kurtosis(col));
        entropies.push_back(entropy_nats(feature_histogram(col, kInternalBins)) /
                            std::log(static_cast<double>(kInternalBins)));
        mis.push_back(hy > 0.0 ? feature_label_mi_nats(col, d.y, m) / hy : 0.0);
    }
    mf.values[4] = sum_invariant(std::move(means)) / df;
    mf.values[5] = sum_invariant(std::move(stds)) / df;
    mf.values[6] = sum_invariant(std::move(skews)) / df;
    mf.values[7] = sum_invariant(std::move(kurts)) / df;

    std::vector<double> abs_corrs;
    for (std::size_t a = 0; a < f; ++a) {
        for (std::size_t b = a + 1; b < f; ++b) {
            abs_corrs.push_back(std::abs(pearson(d.x[a], d.x[b])));
        }
    }
    const std::size_t pairs = abs_corrs.size();
    mf.values[8] =
        pairs > 0 ? sum_invariant(std::move(abs_corrs)) / static_cast<double>(pairs) : 0.0;

    mf.values[9] = hy / std::log(static_cast<double>(m));
    mf.values[10] = sum_invariant(std::move(entropies)) / df;
    mf.values[11] = sum_invariant(std::move(mis)) / df;

    std::size_t majority = 0;
    for (std::size_t c : counts) majority = std::max(majority, c);
    mf.values[12] = static_cast<double>(majority) / static_cast<double>(n);
    return mf;
}

std::vector<double> feature_histogram(std::span<const double> x, int s) {
    if (s < 2) {
        raise(Errc::invalid_argument, "histogram needs at least 2 bins");
    }
    if (x.empty()) {
        raise(Errc::empty_feature, "histogram of empty feature");
    }
    std::vector<double> hist(static_cast<std::size_t>(s), 0.0);
    const auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
    if (*mx_it - *mn_it <= 0.0) return hist;  // degenerate: all-zero vector
    const auto bins = bin_assign(x, s);
    for (int b : bins) hist[static_cast<std::size_t>(b)] += 1.0;
    const double dn = static_cast<double>(x.size());
    for (double& v : hist) v /= dn;
    return hist;
}

FeatureEncoding encode_feature(const MetaFeatureVector& mf, std::span<const double> column,
                               std::string dataset_name, std::string feature_name, int bins) {
    FeatureEncoding e;
    e.dataset_name = std::move(dataset_name);
    e.feature_name = std::move(feature_name);
    e.histogram_bins = bins;
    e.values.assign(mf.values.begin(), mf.values.end());
    const auto hist = feature_histogram(column, bins);
    e.values.insert(e.values.end(), hist.begin(), hist.end());
    return e;
}

FeatureEncoding encode_feature(const Dataset& d, std::size_t feature_index, int bins) {
    if (feature_index >= d.n_features()) {
        raise(Errc::invalid_argument, "feature index out of range");
    }
    return encode_feature(extract_meta_features(d), d.x[feature_index], d.name,
                          d.columns[feature_index].name, bins);
}

DatasetEncoding encode_dataset(const Dataset& d) {
    DatasetEncoding de;
    de.values = extract_meta_features(d).values;
    return de;
}

}  // namespace macfe
