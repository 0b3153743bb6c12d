#include "macfe/datagen.hpp"

#include <cmath>
#include <fstream>

#include "macfe/error.hpp"
#include "macfe/rng.hpp"
#include "macfe/stats.hpp"

namespace macfe::datagen {

namespace {

Dataset assemble(std::string name, std::vector<std::string> col_names,
                 std::vector<std::vector<double>> cols, const std::vector<int>& labels) {
    return make_dataset(std::move(name), std::move(col_names), std::move(cols),
                        std::vector<int>(labels), {"neg", "pos"}, "label", true);
}

}  // namespace

Dataset product_sign(std::string name, std::size_t n, std::size_t noise_features,
                     std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> cols(2 + noise_features, std::vector<double>(n));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cols[0][i] = rng.uniform(-1.0, 1.0);
        cols[1][i] = rng.uniform(-1.0, 1.0);
        for (std::size_t j = 0; j < noise_features; ++j) {
            cols[2 + j][i] = rng.normal();
        }
        y[i] = cols[0][i] * cols[1][i] > 0.0 ? 1 : 0;
    }
    std::vector<std::string> names = {"x1", "x2"};
    for (std::size_t j = 0; j < noise_features; ++j) names.push_back("n" + std::to_string(j + 1));
    return assemble(std::move(name), std::move(names), std::move(cols), y);
}

Dataset folded_bands(std::string name, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> cols(2, std::vector<double>(n));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform(-1.0, 1.0);
        cols[0][i] = x;
        cols[1][i] = rng.normal();
        const int band = static_cast<int>(std::abs(x) * 8.0);
        y[i] = band % 2;
    }
    return assemble(std::move(name), {"x1", "n1"}, std::move(cols), y);
}

Dataset log_ratio(std::string name, std::size_t n, std::size_t noise_features,
                  std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> cols(2 + noise_features, std::vector<double>(n));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cols[0][i] = std::exp(rng.normal());
        cols[1][i] = std::exp(rng.normal());
        for (std::size_t j = 0; j < noise_features; ++j) {
            cols[2 + j][i] = std::exp(rng.normal());
        }
        y[i] = cols[0][i] * cols[1][i] > 1.0 ? 1 : 0;
    }
    std::vector<std::string> names = {"x1", "x2"};
    for (std::size_t j = 0; j < noise_features; ++j) names.push_back("n" + std::to_string(j + 1));
    return assemble(std::move(name), std::move(names), std::move(cols), y);
}

Dataset outlier_heavy(std::string name, std::size_t n, std::size_t features,
                      double outlier_fraction, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> cols(features, std::vector<double>(n));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < features; ++j) {
            double v = rng.normal();
            if (rng.uniform() < outlier_fraction) {
                v = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(8.0, 12.0);
            }
            cols[j][i] = v;
        }
        y[i] = cols[0][i] + 0.5 * rng.normal() > 0.0 ? 1 : 0;
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < features; ++j) names.push_back("x" + std::to_string(j + 1));
    return assemble(std::move(name), std::move(names), std::move(cols), y);
}

Dataset gaussian_linear(std::string name, std::size_t n, std::size_t features,
                        std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> cols(features, std::vector<double>(n));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double score = 0.0;
        for (std::size_t j = 0; j < features; ++j) {
            cols[j][i] = rng.normal();
            score += (j == 0 ? 1.0 : j == 1 ? 0.5 : 0.0) * cols[j][i];
        }
        y[i] = score + 0.5 * rng.normal() > 0.0 ? 1 : 0;
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < features; ++j) names.push_back("x" + std::to_string(j + 1));
    return assemble(std::move(name), std::move(names), std::move(cols), y);
}

Dataset uniform_product(std::string name, std::size_t n, std::size_t features, double threshold,
                        std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> cols(features, std::vector<double>(n));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < features; ++j) {
            cols[j][i] = rng.uniform();
        }
        y[i] = cols[0][i] * cols[1][i] > threshold ? 1 : 0;
    }
    std::vector<std::string> names;
    for (std::size_t j = 0; j < features; ++j) names.push_back("x" + std::to_string(j + 1));
    return assemble(std::move(name), std::move(names), std::move(cols), y);
}

SemSample linear_sem(std::string name, std::size_t n, std::uint64_t seed) {
    // x1 -> x3 (0.8), x0 -> x2 (0.9), x1 -> target (1.5), x3 -> target
    // (-1.0); x4 is pure noise. Standardized linear-Gaussian data only
    // identifies feature edges up to Markov equivalence, so the two feature
    // chains may come back flipped; edges into the target are mask-forced.
    // Worst case (both chains flipped, target edges recovered) is SHD 2.
    constexpr std::size_t kFeatures = 5;
    SemSample sample;
    sample.truth = Mat(kFeatures + 1, kFeatures + 1);
    sample.truth(1, 3) = 0.8;
    sample.truth(0, 2) = 0.9;
    sample.truth(1, kFeatures) = 1.5;
    sample.truth(3, kFeatures) = -1.0;
    sample.top_feature = 1;

    Rng rng(seed);
    std::vector<std::vector<double>> cols(kFeatures, std::vector<double>(n));
    std::vector<double> score(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = rng.normal();
        const double x1 = rng.normal();
        const double x2 = 0.9 * x0 + rng.normal();
        const double x3 = 0.8 * x1 + rng.normal();
        const double x4 = rng.normal();
        cols[0][i] = x0;
        cols[1][i] = x1;
        cols[2][i] = x2;
        cols[3][i] = x3;
        cols[4][i] = x4;
        score[i] = 1.5 * x1 - 1.0 * x3 + rng.normal();
    }
    const double cut = median(score);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = score[i] > cut ? 1 : 0;

    std::vector<std::string> names;
    for (std::size_t j = 0; j < kFeatures; ++j) names.push_back("x" + std::to_string(j));
    sample.data = assemble(std::move(name), std::move(names), std::move(cols), y);
    return sample;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        raise(Errc::io_error, "cannot write '" + path.string() + "'");
    }
    for (const auto& c : d.columns) out << c.name << ',';
    out << d.target_name << '\n';
    for (std::size_t i = 0; i < d.n_instances(); ++i) {
        for (const auto& col : d.x) out << format_double(col[i]) << ',';
        out << d.label_names[static_cast<std::size_t>(d.y[i])] << '\n';
    }
    out.flush();
    if (!out) {
        raise(Errc::io_error, "write failed for '" + path.string() + "'");
    }
}

}  // namespace macfe::datagen
