#include "macfe/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

#include "macfe/error.hpp"

namespace macfe {

namespace {

constexpr double kVarianceFloor = 1e-24;

// Accumulates in ascending term order, so the result depends only on the
// multiset of terms. Statistics built on this are bit-identical under row
// (and column) permutations, which the encodings rely on.
double canonical_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double v : terms) s += v;
    return s;
}

std::vector<double> sorted_copy(std::span<const double> x) {
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

double sum_invariant(std::vector<double> terms) { return canonical_sum(terms); }

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    const auto v = sorted_copy(x);
    double s = 0.0;
    for (double t : v) s += t;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.empty()) return 0.0;
    const double mu = mean(x);
    const auto v = sorted_copy(x);
    double s = 0.0;
    for (double t : v) s += (t - mu) * (t - mu);
    return s / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

double skewness(std::span<const double> x) {
    const double mu = mean(x);
    const auto v = sorted_copy(x);
    double m2 = 0.0, m3 = 0.0;
    for (double t : v) {
        const double d = t - mu;
        m2 += d * d;
        m3 += d * d * d;
    }
    const double n = static_cast<double>(x.size());
    m2 /= n;
    m3 /= n;
    if (m2 <= kVarianceFloor) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

double excess_kurtosis(std::span<const double> x) {
    const double mu = mean(x);
    const auto v = sorted_copy(x);
    double m2 = 0.0, m4 = 0.0;
    for (double t : v) {
        const double d = t - mu;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double n = static_cast<double>(x.size());
    m2 /= n;
    m4 /= n;
    if (m2 <= kVarianceFloor) return 0.0;
    return m4 / (m2 * m2) - 3.0;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) {
        raise(Errc::length_mismatch, "pearson: input lengths differ");
    }
    const double mx = mean(x);
    const double my = mean(y);
    // accumulate in an order canonical over row pairs
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i : order) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= kVarianceFloor || syy <= kVarianceFloor) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

double quantile_type7_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) raise(Errc::empty_feature, "quantile of empty input");
    if (p <= 0.0) return sorted.front();
    if (p >= 1.0) return sorted.back();
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile_type7(std::span<const double> x, double p) {
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_type7_sorted(sorted, p);
}

double median(std::span<const double> x) { return quantile_type7(x, 0.5); }

double entropy_nats(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double label_entropy_nats(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    if (total == 0) return 0.0;
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log(p);
    }
    return h;
}

std::uint64_t fnv1a64(std::span<const char> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char b : bytes) {
        h ^= static_cast<unsigned char>(b);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool try_parse_double(const std::string& token, double& out) {
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

double parse_double_strict(const std::string& token) {
    double v = 0.0;
    if (!try_parse_double(token, v)) {
        raise(Errc::parse_error, "not a finite number: '" + token + "'");
    }
    return v;
}

}  // namespace macfe
