#include "macfe/causal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "macfe/diag.hpp"
#include "macfe/stats.hpp"

namespace macfe {

Mat mat_mul(const Mat& lhs, const Mat& rhs) {
    if (lhs.cols != rhs.rows) {
        raise(Errc::length_mismatch, "matrix product shape mismatch");
    }
    Mat out(lhs.rows, rhs.cols);
    for (std::size_t i = 0; i < lhs.rows; ++i) {
        for (std::size_t k = 0; k < lhs.cols; ++k) {
            const double v = lhs(i, k);
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols; ++j) {
                out(i, j) += v * rhs(k, j);
            }
        }
    }
    return out;
}

Mat mat_exp(const Mat& m) {
    if (m.rows != m.cols) {
        raise(Errc::non_square, "matrix exponential needs a square matrix");
    }
    const std::size_t d = m.rows;
    // scale so the series converges fast, then square back
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < d; ++j) row += std::abs(m(i, j));
        norm = std::max(norm, row);
    }
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.5) {
        scale *= 0.5;
        squarings++;
    }
    Mat scaled(d, d);
    for (std::size_t i = 0; i < d * d; ++i) scaled.a[i] = m.a[i] * scale;

    Mat result(d, d);
    Mat term(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        result(i, i) = 1.0;
        term(i, i) = 1.0;
    }
    for (int k = 1; k <= 40; ++k) {
        term = mat_mul(term, scaled);
        const double inv = 1.0 / static_cast<double>(k);
        double largest = 0.0;
        for (std::size_t i = 0; i < d * d; ++i) {
            term.a[i] *= inv;
            result.a[i] += term.a[i];
            largest = std::max(largest, std::abs(term.a[i]));
        }
        if (largest < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) result = mat_mul(result, result);
    return result;
}

std::pair<double, Mat> acyclicity(const Mat& w) {
    if (w.rows != w.cols) {
        raise(Errc::non_square, "acyclicity needs a square matrix");
    }
    const std::size_t d = w.rows;
    Mat hadamard(d, d);
    for (std::size_t i = 0; i < d * d; ++i) hadamard.a[i] = w.a[i] * w.a[i];
    const Mat e = mat_exp(hadamard);
    double h = -static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) h += e(i, i);
    Mat grad(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            grad(i, j) = 2.0 * e(j, i) * w(i, j);
        }
    }
    return {h, grad};
}

bool is_acyclic(const Mat& w) {
    const std::size_t d = w.rows;
    std::vector<std::size_t> indegree(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (i != j && w(i, j) != 0.0) indegree[j]++;
        }
    }
    std::vector<std::size_t> queue;
    for (std::size_t j = 0; j < d; ++j) {
        if (indegree[j] == 0) queue.push_back(j);
    }
    std::size_t removed = 0;
    while (!queue.empty()) {
        const std::size_t node = queue.back();
        queue.pop_back();
        removed++;
        for (std::size_t j = 0; j < d; ++j) {
            if (j != node && w(node, j) != 0.0) {
                if (--indegree[j] == 0) queue.push_back(j);
            }
        }
    }
    return removed == d;
}

namespace {

struct Problem {
    Mat gram;        // Z^T Z / n
    std::size_t dim;
    std::size_t target;

    bool masked(std::size_t i, std::size_t j) const {
        return i == j || i == target;  // no self loops, target is a sink
    }

    double loss(const Mat& w) const {
        // 0.5 tr((I-W)^T G (I-W))
        Mat iw(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                iw(i, j) = (i == j ? 1.0 : 0.0) - w(i, j);
            }
        }
        const Mat gi = mat_mul(gram, iw);
        double v = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                v += iw(i, j) * gi(i, j);
            }
        }
        return 0.5 * v;
    }

    Mat loss_grad(const Mat& w) const {
        // G W - G
        Mat g = mat_mul(gram, w);
        for (std::size_t i = 0; i < dim * dim; ++i) g.a[i] -= gram.a[i];
        return g;
    }
};

struct SmoothEval {
    double value;
    Mat grad;
};

SmoothEval smooth_eval(const Problem& prob, const Mat& w, double rho, double mult) {
    auto [h, h_grad] = acyclicity(w);
    SmoothEval ev;
    ev.value = prob.loss(w) + 0.5 * rho * h * h + mult * h;
    ev.grad = prob.loss_grad(w);
    const double coef = rho * h + mult;
    for (std::size_t i = 0; i < w.rows * w.cols; ++i) {
        ev.grad.a[i] += coef * h_grad.a[i];
    }
    return ev;
}

double smooth_value(const Problem& prob, const Mat& w, double rho, double mult) {
    const double h = acyclicity(w).first;
    return prob.loss(w) + 0.5 * rho * h * h + mult * h;
}

// Accelerated proximal gradient (FISTA with backtracking and function-value
// restart) on the smooth augmented Lagrangian plus the l1 term; masked
// entries stay pinned at zero. Soft-thresholding snaps cycle-forming weights
// to exact zero, which is what lets h reach the tolerance.
Mat minimize_subproblem(const Problem& prob, Mat w, double rho, double mult, double lambda,
                        int max_iter) {
    const std::size_t nn = w.rows * w.cols;

    const auto l1_of = [&](const Mat& m) {
        double s = 0.0;
        for (std::size_t i = 0; i < nn; ++i) s += std::abs(m.a[i]);
        return s;
    };

    Mat y = w;       // extrapolation point
    Mat prev = w;
    double momentum = 1.0;
    double step = 1.0;
    double f_best = smooth_value(prob, w, rho, mult) + lambda * l1_of(w);

    for (int iter = 0; iter < max_iter; ++iter) {
        const SmoothEval at = smooth_eval(prob, y, rho, mult);
        Mat next(w.rows, w.cols);
        double f_smooth_next = 0.0;
        bool progressed = false;
        while (true) {
            for (std::size_t i = 0; i < w.rows; ++i) {
                for (std::size_t j = 0; j < w.cols; ++j) {
                    double v = 0.0;
                    if (!prob.masked(i, j)) {
                        v = y(i, j) - step * at.grad(i, j);
                        const double thr = step * lambda;
                        v = v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
                    }
                    next(i, j) = v;
                }
            }
            double upper = at.value;
            double sq = 0.0;
            for (std::size_t idx = 0; idx < nn; ++idx) {
                const double diff = next.a[idx] - y.a[idx];
                upper += at.grad.a[idx] * diff;
                sq += diff * diff;
            }
            upper += sq / (2.0 * step);
            f_smooth_next = smooth_value(prob, next, rho, mult);
            if (f_smooth_next <= upper + 1e-12) {
                progressed = true;
                break;
            }
            step *= 0.5;
            if (step < 1e-14) break;
        }
        if (!progressed) break;

        const double f_next = f_smooth_next + lambda * l1_of(next);
        double max_move = 0.0;
        for (std::size_t idx = 0; idx < nn; ++idx) {
            max_move = std::max(max_move, std::abs(next.a[idx] - prev.a[idx]));
        }

        if (f_next > f_best + 1e-12) {
            // objective went up under momentum: restart from the best point
            momentum = 1.0;
            y = prev;
            if (max_move < 1e-12) break;
            continue;
        }
        f_best = f_next;

        const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double beta = (momentum - 1.0) / momentum_next;
        y = next;
        for (std::size_t idx = 0; idx < nn; ++idx) {
            y.a[idx] += beta * (next.a[idx] - prev.a[idx]);
        }
        momentum = momentum_next;
        prev = next;
        w = std::move(next);
        if (max_move < 1e-9) break;
        step = std::min(step * 1.25, 1.0);
    }
    return w;
}

std::vector<double> standardize(std::span<const double> col) {
    const double mu = mean(col);
    const double sd = stddev(col);
    std::vector<double> out(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) {
        out[i] = sd > 0.0 ? (col[i] - mu) / sd : 0.0;
    }
    return out;
}

}  // namespace

WeightedDAG fit_dag(const Dataset& d, const DagOptions& opts) {
    if (!d.preprocessed) {
        raise(Errc::invalid_argument, "fit_dag requires a preprocessed dataset");
    }
    const std::size_t f = d.n_features();
    const std::size_t dim = f + 1;
    const std::size_t n = d.n_instances();
    diag::log_fit_rows(n);

    // standardized design matrix: features then integer-coded target
    std::vector<std::vector<double>> z;
    z.reserve(dim);
    for (std::size_t j = 0; j < f; ++j) z.push_back(standardize(d.x[j]));
    {
        std::vector<double> target(n);
        for (std::size_t i = 0; i < n; ++i) target[i] = static_cast<double>(d.y[i]);
        z.push_back(standardize(target));
    }

    Problem prob;
    prob.dim = dim;
    prob.target = f;
    prob.gram = Mat(dim, dim);
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = a; b < dim; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += z[a][i] * z[b][i];
            s /= static_cast<double>(n);
            prob.gram(a, b) = s;
            prob.gram(b, a) = s;
        }
    }

    Mat w(dim, dim);
    double rho = 1.0;
    double mult = 0.0;
    double h = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        Mat candidate = w;
        double h_new = h;
        while (true) {
            candidate = minimize_subproblem(prob, w, rho, mult, opts.lambda, opts.max_inner);
            h_new = acyclicity(candidate).first;
            if (h_new > 0.25 * h && rho < opts.rho_max) {
                rho *= opts.rho_growth;
                continue;
            }
            break;
        }
        w = std::move(candidate);
        h = h_new;
        mult += rho * h;
        if (h <= opts.h_tol) {
            converged = true;
            break;
        }
        if (rho >= opts.rho_max) break;  // penalty exhausted; report non-convergence
    }

    WeightedDAG dag;
    dag.omega = opts.omega;
    dag.target_index = f;
    dag.node_names.reserve(dim);
    for (const auto& c : d.columns) dag.node_names.push_back(c.name);
    dag.node_names.push_back(d.target_name);
    dag.w = Mat(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            dag.w(i, j) = std::abs(w(i, j)) < opts.omega ? 0.0 : w(i, j);
        }
    }

    if (!converged) {
        throw NonConvergenceError(
            "acyclicity residual " + format_double(h) + " above tolerance " +
                format_double(opts.h_tol) + " after " + std::to_string(opts.max_outer) +
                " outer rounds",
            std::move(dag));
    }
    if (!is_acyclic(dag.w)) {
        throw NonConvergenceError("pruned graph still contains a cycle", std::move(dag));
    }
    return dag;
}

CausalRanking rank_features(const WeightedDAG& g) {
    CausalRanking ranking;
    const std::size_t f = g.w.rows - 1;
    ranking.entries.reserve(f);
    for (std::size_t i = 0; i < f; ++i) {
        ranking.entries.emplace_back(i, std::abs(g.w(i, g.target_index)));
    }
    std::sort(ranking.entries.begin(), ranking.entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranking;
}

std::vector<std::size_t> select_top(const CausalRanking& ranking, double s) {
    if (!(s > 0.0) || s > 1.0) {
        raise(Errc::bad_threshold, "selection fraction must lie in (0,1]");
    }
    const std::size_t n = ranking.entries.size();
    const std::size_t k =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(s * static_cast<double>(n))));
    std::vector<std::size_t> out;
    out.reserve(std::min(k, n));
    for (std::size_t i = 0; i < std::min(k, n); ++i) out.push_back(ranking.entries[i].first);
    std::sort(out.begin(), out.end());
    return out;
}

std::string to_dot(const WeightedDAG& g) {
    std::ostringstream os;
    os << "digraph causal {\n";
    for (const auto& name : g.node_names) {
        os << "  \"" << name << "\";\n";
    }
    for (std::size_t i = 0; i < g.w.rows; ++i) {
        for (std::size_t j = 0; j < g.w.cols; ++j) {
            if (g.w(i, j) != 0.0) {
                os << "  \"" << g.node_names[i] << "\" -> \"" << g.node_names[j]
                   << "\" [label=\"" << format_double(g.w(i, j)) << "\"];\n";
            }
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace macfe
