#include "macfe/mic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "macfe/error.hpp"

namespace macfe {

namespace {

// Sorted view of one variable: point ids ordered by (value, input index) so
// tie handling is stable, plus tie-group boundaries. Every downstream
// quantity is computed from counts only, which is what makes the score
// invariant under strictly increasing maps.
struct AxisOrder {
    std::vector<int> order;        // point ids, sorted
    std::vector<int> group_start;  // group g = order[group_start[g] .. group_start[g+1])

    int groups() const { return static_cast<int>(group_start.size()) - 1; }
    int group_size(int g) const { return group_start[g + 1] - group_start[g]; }
};

AxisOrder sort_axis(std::span<const double> v) {
    AxisOrder ax;
    ax.order.resize(v.size());
    std::iota(ax.order.begin(), ax.order.end(), 0);
    std::stable_sort(ax.order.begin(), ax.order.end(),
                     [&](int a, int b) { return v[a] < v[b]; });
    ax.group_start.push_back(0);
    for (std::size_t i = 1; i < ax.order.size(); ++i) {
        if (v[ax.order[i]] != v[ax.order[i - 1]]) {
            ax.group_start.push_back(static_cast<int>(i));
        }
    }
    ax.group_start.push_back(static_cast<int>(ax.order.size()));
    return ax;
}

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

// Assigns whole tie-groups to q rows of roughly equal mass. Returns the
// realized row count (can be below q when ties are large).
int equipartition(const AxisOrder& ax, int q, std::vector<int>& row_of) {
    const int n = static_cast<int>(ax.order.size());
    row_of.assign(ax.order.size(), 0);
    int cur = 0;
    int consumed = 0;
    int fill = 0;
    double target = static_cast<double>(n) / q;
    for (int g = 0; g < ax.groups(); ++g) {
        const int s = ax.group_size(g);
        if (fill != 0 && cur < q - 1 &&
            std::abs(fill + s - target) >= std::abs(fill - target)) {
            cur++;
            fill = 0;
            target = static_cast<double>(n - consumed) / (q - cur);
        }
        for (int i = ax.group_start[g]; i < ax.group_start[g + 1]; ++i) {
            row_of[static_cast<std::size_t>(ax.order[i])] = cur;
        }
        fill += s;
        consumed += s;
    }
    return cur + 1;
}

struct Clumps {
    std::vector<int> size;               // points per clump, in sorted-x order
    std::vector<std::vector<int>> rows;  // per-clump row counts
};

// Merges consecutive same-row points into clumps; a column-axis tie-group
// spanning several rows becomes an unmergeable clump of its own.
Clumps build_clumps(const AxisOrder& col_axis, const std::vector<int>& row_of, int n_rows) {
    Clumps c;
    int last_row = -2;  // -2: nothing mergeable before
    for (int g = 0; g < col_axis.groups(); ++g) {
        const int begin = col_axis.group_start[g];
        const int end = col_axis.group_start[g + 1];
        int row = row_of[static_cast<std::size_t>(col_axis.order[begin])];
        bool pure = true;
        for (int i = begin + 1; i < end; ++i) {
            if (row_of[static_cast<std::size_t>(col_axis.order[i])] != row) {
                pure = false;
                break;
            }
        }
        const bool merge = pure && row == last_row && !c.size.empty();
        if (!merge) {
            c.size.push_back(0);
            c.rows.emplace_back(n_rows, 0);
        }
        c.size.back() += end - begin;
        for (int i = begin; i < end; ++i) {
            c.rows.back()[static_cast<std::size_t>(
                row_of[static_cast<std::size_t>(col_axis.order[i])])]++;
        }
        last_row = pure ? row : -2;
    }
    return c;
}

// Caps the clump count by merging neighbors with the same balanced-mass rule
// used for rows; clumps are never split.
Clumps superclumps(const Clumps& in, int cap) {
    const int k = static_cast<int>(in.size.size());
    if (k <= cap) return in;
    Clumps out;
    const int n = std::accumulate(in.size.begin(), in.size.end(), 0);
    int cur = 0;
    int consumed = 0;
    int fill = 0;
    double target = static_cast<double>(n) / cap;
    for (int g = 0; g < k; ++g) {
        const int s = in.size[g];
        if (fill != 0 && cur < cap - 1 &&
            std::abs(fill + s - target) >= std::abs(fill - target)) {
            cur++;
            fill = 0;
            target = static_cast<double>(n - consumed) / (cap - cur);
        }
        if (static_cast<int>(out.size.size()) == cur) {
            out.size.push_back(0);
            out.rows.emplace_back(in.rows[0].size(), 0);
        }
        out.size[static_cast<std::size_t>(cur)] += s;
        for (std::size_t r = 0; r < in.rows[g].size(); ++r) {
            out.rows[static_cast<std::size_t>(cur)][r] += in.rows[g][r];
        }
        fill += s;
        consumed += s;
    }
    return out;
}

// For the fixed row partition, returns best_i[l] = the maximum mutual
// information over column partitions with at most l columns drawn from clump
// boundaries, for l = 2..max_cols. Dynamic program over prefix entropies:
//   F(t,l) = max over partitions of the first t clumps into <= l columns of
//            H(cols) - H(cols,rows), masses relative to the prefix.
std::vector<double> optimize_columns(const Clumps& c, int max_cols, double h_rows_full) {
    const int k = static_cast<int>(c.size.size());
    const int n_rows = static_cast<int>(c.rows.empty() ? 0 : c.rows[0].size());
    const int lmax = std::min(max_cols, k);

    // cumulative masses: cum[t] = points in clumps [0, t)
    std::vector<double> cum(static_cast<std::size_t>(k) + 1, 0.0);
    std::vector<std::vector<double>> cumrow(static_cast<std::size_t>(k) + 1,
                                            std::vector<double>(n_rows, 0.0));
    for (int t = 1; t <= k; ++t) {
        cum[t] = cum[t - 1] + c.size[t - 1];
        for (int r = 0; r < n_rows; ++r) {
            cumrow[t][r] = cumrow[t - 1][r] + c.rows[t - 1][r];
        }
    }

    std::vector<std::vector<double>> f(
        static_cast<std::size_t>(k) + 1,
        std::vector<double>(static_cast<std::size_t>(lmax) + 1,
                            -std::numeric_limits<double>::infinity()));
    for (int t = 1; t <= k; ++t) {
        double v = 0.0;
        for (int r = 0; r < n_rows; ++r) v += xlogx(cumrow[t][r] / cum[t]);
        f[t][1] = v;  // single column: -(row entropy of the prefix)
    }
    for (int l = 2; l <= lmax; ++l) {
        for (int t = l; t <= k; ++t) {
            double best = -std::numeric_limits<double>::infinity();
            for (int s = l - 1; s < t; ++s) {
                const double d = cum[t] - cum[s];
                double v = (cum[s] / cum[t]) * f[s][l - 1] - xlogx(d / cum[t]);
                for (int r = 0; r < n_rows; ++r) {
                    v += xlogx((cumrow[t][r] - cumrow[s][r]) / cum[t]);
                }
                best = std::max(best, v);
            }
            f[t][l] = best;
        }
    }

    std::vector<double> best_i(static_cast<std::size_t>(max_cols) + 1, 0.0);
    double running = 0.0;
    for (int l = 2; l <= max_cols; ++l) {
        if (l <= lmax) running = std::max(running, f[k][l] + h_rows_full);
        best_i[static_cast<std::size_t>(l)] = running;
    }
    return best_i;
}

void validate_pair(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        raise(Errc::length_mismatch, "mic inputs differ in length");
    }
    if (x.size() < 4) {
        raise(Errc::too_few_samples, "mic needs at least 4 samples, got " +
                                         std::to_string(x.size()));
    }
    for (double v : x) {
        if (!std::isfinite(v)) raise(Errc::invalid_argument, "mic input contains non-finite value");
    }
    for (double v : y) {
        if (!std::isfinite(v)) raise(Errc::invalid_argument, "mic input contains non-finite value");
    }
}

double budget(std::size_t n, const MicConfig& cfg) {
    if (!(cfg.alpha > 0.0) || cfg.alpha > 1.0) {
        raise(Errc::invalid_argument, "mic alpha must lie in (0,1]");
    }
    if (cfg.c < 1) {
        raise(Errc::invalid_argument, "mic c must be at least 1");
    }
    // Floor of 4 keeps the 2x2 grid admissible for every legal n.
    return std::max(4.0, std::pow(static_cast<double>(n), cfg.alpha));
}

// One orientation: equipartition the row axis into q parts for every q, then
// optimize the column axis. Fills value(cols=l, rows=q) into `emit`.
template <class Emit>
void scan_orientation(const AxisOrder& col_axis, const AxisOrder& row_axis, double b,
                      const MicConfig& cfg, Emit&& emit) {
    const int max_rows = std::min(row_axis.groups(), static_cast<int>(b / 2.0));
    std::vector<int> row_of;
    for (int q = 2; q <= max_rows; ++q) {
        const int pmax = std::min(static_cast<int>(b / q), col_axis.groups());
        if (pmax < 2) break;
        const int realized = equipartition(row_axis, q, row_of);
        double h_rows = 0.0;
        {
            std::vector<double> rowmass(static_cast<std::size_t>(realized), 0.0);
            for (int r : row_of) rowmass[static_cast<std::size_t>(r)] += 1.0;
            const double dn = static_cast<double>(row_of.size());
            for (double m : rowmass) h_rows -= xlogx(m / dn);
        }
        Clumps c = build_clumps(col_axis, row_of, realized);
        c = superclumps(c, std::max(2, cfg.c * pmax));
        const auto best_i = optimize_columns(c, pmax, h_rows);
        for (int l = 2; l <= pmax; ++l) {
            emit(l, q, best_i[static_cast<std::size_t>(l)]);
        }
    }
}

}  // namespace

double mic(std::span<const double> x, std::span<const double> y, const MicConfig& cfg) {
    validate_pair(x, y);
    const AxisOrder ax = sort_axis(x);
    const AxisOrder ay = sort_axis(y);
    if (ax.groups() < 2 || ay.groups() < 2) return 0.0;  // constant variable

    const double b = budget(x.size(), cfg);
    double best = 0.0;
    const auto emit = [&best](int kx, int ky, double i_val) {
        const double norm = std::log(static_cast<double>(std::min(kx, ky)));
        best = std::max(best, i_val / norm);
    };
    scan_orientation(ax, ay, b, cfg, emit);                                   // rows on y
    scan_orientation(ay, ax, b, cfg, [&](int l, int q, double v) { emit(q, l, v); });  // rows on x
    return std::clamp(best, 0.0, 1.0);
}

double mic(std::span<const double> x, std::span<const int> labels, const MicConfig& cfg) {
    std::vector<double> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = static_cast<double>(labels[i]);
    return mic(x, std::span<const double>(y), cfg);
}

double mic_gain(std::span<const double> t_out, std::span<const double> x,
                std::span<const int> labels, const MicConfig& cfg) {
    if (t_out.size() != x.size() || x.size() != labels.size()) {
        raise(Errc::length_mismatch, "mic_gain inputs differ in length");
    }
    for (double v : t_out) {
        if (!std::isfinite(v)) {
            raise(Errc::non_finite_transform_output, "transform output contains non-finite value");
        }
    }
    return mic(t_out, labels, cfg) - mic(x, labels, cfg);
}

double mic_exact_oracle(std::span<const double> x, std::span<const double> y,
                        const MicConfig& cfg) {
    if (x.size() > 12) {
        raise(Errc::too_large, "exact oracle is exponential; n must be <= 12");
    }
    validate_pair(x, y);
    const AxisOrder ax = sort_axis(x);
    const AxisOrder ay = sort_axis(y);
    if (ax.groups() < 2 || ay.groups() < 2) return 0.0;

    const double b = budget(x.size(), cfg);
    const std::size_t n = x.size();

    // bin id per point for a given subset of cut positions between tie groups
    const auto assign = [n](const AxisOrder& axis, unsigned cuts, std::vector<int>& bin_of) {
        bin_of.assign(n, 0);
        int bin = 0;
        for (int g = 0; g < axis.groups(); ++g) {
            if (g > 0 && (cuts >> (g - 1)) & 1u) bin++;
            for (int i = axis.group_start[g]; i < axis.group_start[g + 1]; ++i) {
                bin_of[static_cast<std::size_t>(axis.order[i])] = bin;
            }
        }
        return bin + 1;
    };

    double best = 0.0;
    std::vector<int> col_of, row_of;
    const unsigned x_positions = static_cast<unsigned>(ax.groups() - 1);
    const unsigned y_positions = static_cast<unsigned>(ay.groups() - 1);
    for (unsigned xc = 0; xc < (1u << x_positions); ++xc) {
        const int kx = std::popcount(xc) + 1;
        if (kx < 2 || 2.0 * kx > b) continue;
        assign(ax, xc, col_of);
        for (unsigned yc = 0; yc < (1u << y_positions); ++yc) {
            const int ky = std::popcount(yc) + 1;
            if (ky < 2 || static_cast<double>(kx) * ky > b) continue;
            assign(ay, yc, row_of);

            std::vector<double> joint(static_cast<std::size_t>(kx) * ky, 0.0);
            std::vector<double> colm(static_cast<std::size_t>(kx), 0.0);
            std::vector<double> rowm(static_cast<std::size_t>(ky), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                joint[static_cast<std::size_t>(col_of[i]) * ky +
                      static_cast<std::size_t>(row_of[i])] += 1.0;
                colm[static_cast<std::size_t>(col_of[i])] += 1.0;
                rowm[static_cast<std::size_t>(row_of[i])] += 1.0;
            }
            double info = 0.0;
            const double dn = static_cast<double>(n);
            for (int a = 0; a < kx; ++a) {
                for (int r = 0; r < ky; ++r) {
                    const double j = joint[static_cast<std::size_t>(a) * ky +
                                           static_cast<std::size_t>(r)];
                    if (j <= 0.0) continue;
                    info += (j / dn) * std::log(j * dn / (colm[static_cast<std::size_t>(a)] *
                                                          rowm[static_cast<std::size_t>(r)]));
                }
            }
            best = std::max(best, info / std::log(static_cast<double>(std::min(kx, ky))));
        }
    }
    return std::clamp(best, 0.0, 1.0);
}

}  // namespace macfe
