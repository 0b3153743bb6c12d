#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "macfe/dataset.hpp"
#include "macfe/error.hpp"

namespace macfe {

// Minimal dense row-major matrix; big enough for (n_features+1)^2 work.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    bool operator==(const Mat&) const = default;
};

Mat mat_mul(const Mat& lhs, const Mat& rhs);
Mat mat_exp(const Mat& m);  // scaling-and-squaring Taylor series

// Smooth acyclicity measure h(W) = trace(exp(W∘W)) - dim and its gradient
// 2·exp(W∘W)^T ∘ W. h = 0 iff the nonzero pattern of W is acyclic.
std::pair<double, Mat> acyclicity(const Mat& w);

struct DagOptions {
    double lambda = 0.1;     // l1 penalty
    double omega = 0.3;      // pruning threshold on |W|
    double h_tol = 1e-8;
    int max_outer = 100;
    double rho_growth = 10.0;
    double rho_max = 1e16;
    int max_inner = 2000;    // proximal-gradient iteration cap per subproblem
};

struct WeightedDAG {
    Mat w;                                // pruned weights, (n+1)x(n+1)
    std::vector<std::string> node_names;  // features then target
    double omega = 0.0;
    std::size_t target_index = 0;
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(std::string message, WeightedDAG last_iterate)
        : Error(Errc::non_convergence, std::move(message)), last(std::move(last_iterate)) {}
    WeightedDAG last;
};

// Least-squares structural fit with l1 penalty under the acyclicity
// constraint, solved by an augmented Lagrangian with proximal-gradient inner
// steps. Columns are standardized internally; the integer-coded target is
// appended as a sink node (its outgoing edges are masked to zero).
WeightedDAG fit_dag(const Dataset& d, const DagOptions& opts = {});

struct CausalRanking {
    // (feature index, |direct edge into target|), sorted non-increasing,
    // ties by ascending index.
    std::vector<std::pair<std::size_t, double>> entries;
};

CausalRanking rank_features(const WeightedDAG& g);

// k = ceil(s * n_features), k >= 1; returns the top-k feature indices in
// ascending index order.
std::vector<std::size_t> select_top(const CausalRanking& ranking, double s);

bool is_acyclic(const Mat& w);  // Kahn's algorithm on the nonzero pattern
std::string to_dot(const WeightedDAG& g);

}  // namespace macfe
