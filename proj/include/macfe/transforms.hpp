#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "macfe/dataset.hpp"

namespace macfe {

enum class TransformKind { unary, binary, scaler };

// Closed registries. Unary/binary transforms are total on finite input:
// log(x) = sign(x)·ln(1+|x|), sqrt(x) = sqrt(|x|), reciprocal and divide are
// epsilon-regularized, and any overflow saturates to +-DBL_MAX.
std::span<const std::string_view> unary_names();   // log sqrt square cube reciprocal sigmoid tanh
std::span<const std::string_view> binary_names();  // add subtract multiply divide
std::span<const std::string_view> scaler_names();  // minmax standard robust

// Fingerprint component; changes whenever the registry contents change.
std::string_view registry_version();

struct TransformId {
    TransformKind kind = TransformKind::unary;
    std::string name;

    bool operator==(const TransformId&) const = default;
};

TransformId make_transform(TransformKind kind, std::string_view name);  // validates name
bool is_commutative(const TransformId& id);                             // add, multiply
std::string transform_token(const TransformId& id);                     // "kind:name"
TransformId parse_transform_token(std::string_view token);

std::vector<double> apply_unary(const TransformId& id, std::span<const double> x);
std::vector<double> apply_binary(const TransformId& id, std::span<const double> a,
                                 std::span<const double> b);

// Per-column affine scaling v -> (v - offset) / scale; scale 0 (constant
// column at fit time) maps the column to all zeros.
struct ColumnScale {
    double offset = 0.0;
    double scale = 0.0;
};

struct ScalerParams {
    TransformId id;
    std::vector<ColumnScale> columns;
};

ScalerParams fit_scaler(const TransformId& id, const std::vector<std::vector<double>>& columns);
std::vector<std::vector<double>> apply_scaler(const ScalerParams& params,
                                              const std::vector<std::vector<double>>& columns);

// Expression tree over source-feature leaves. order() counts internal nodes;
// generated features always have order >= 1.
class TransformExpr {
public:
    static TransformExpr leaf(std::size_t feature_index, std::string feature_name);
    static TransformExpr unary(TransformId id, TransformExpr child);
    static TransformExpr binary(TransformId id, TransformExpr left, TransformExpr right);

    std::size_t order() const;
    bool is_leaf() const { return node_->children.empty(); }

    // Nested prefix grammar, e.g. square(mult(log(f:x1),f:x2)).
    std::string to_string() const;
    // Leaves are resolved by feature name against `names`.
    static TransformExpr parse(std::string_view text, std::span<const std::string> names);

private:
    struct Node {
        TransformId id;                                // unset for leaves
        std::size_t feature_index = 0;                 // leaves only
        std::string feature_name;                      // leaves only
        std::vector<std::shared_ptr<const Node>> children;
    };
    std::shared_ptr<const Node> node_;

    friend std::vector<double> eval_expr(const TransformExpr&,
                                         const std::vector<std::vector<double>>&);
};

// Bottom-up evaluation against source columns; leaf indices address `columns`.
// Rejects order-0 expressions (a bare leaf is not a generated feature).
std::vector<double> eval_expr(const TransformExpr& expr,
                              const std::vector<std::vector<double>>& columns);
std::vector<double> eval_expr(const TransformExpr& expr, const Dataset& d);

}  // namespace macfe
