#include "macfe/transforms.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "macfe/error.hpp"
#include "macfe/stats.hpp"

namespace macfe {

namespace {

constexpr double kEps = 1e-8;

// Overflow saturates so every registry transform stays total on finite input.
double clamp_finite(double v) {
    if (std::isnan(v)) return 0.0;
    if (v > DBL_MAX) return DBL_MAX;
    if (v < -DBL_MAX) return -DBL_MAX;
    return v;
}

constexpr std::string_view kUnary[] = {"log", "sqrt", "square", "cube",
                                       "reciprocal", "sigmoid", "tanh"};
constexpr std::string_view kBinary[] = {"add", "subtract", "multiply", "divide"};
constexpr std::string_view kScaler[] = {"minmax", "standard", "robust"};

int index_of(std::span<const std::string_view> names, std::string_view name) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

double unary_value(int op, double x) {
    switch (op) {
        case 0: return x >= 0.0 ? std::log1p(x) : -std::log1p(-x);
        case 1: return std::sqrt(std::abs(x));
        case 2: return clamp_finite(x * x);
        case 3: return clamp_finite(x * x * x);
        case 4: return clamp_finite(x / (x * x + kEps * kEps));
        case 5: return 1.0 / (1.0 + std::exp(-x));
        case 6: return std::tanh(x);
        default: raise(Errc::unknown_transform, "bad unary op index");
    }
}

double binary_value(int op, double a, double b) {
    switch (op) {
        case 0: return clamp_finite(a + b);
        case 1: return clamp_finite(a - b);
        case 2: return clamp_finite(a * b);
        case 3: return clamp_finite(a * b / (b * b + kEps * kEps));
        default: raise(Errc::unknown_transform, "bad binary op index");
    }
}

std::span<const std::string_view> names_for(TransformKind kind) {
    switch (kind) {
        case TransformKind::unary: return kUnary;
        case TransformKind::binary: return kBinary;
        case TransformKind::scaler: return kScaler;
    }
    return {};
}

std::string_view kind_token(TransformKind kind) {
    switch (kind) {
        case TransformKind::unary: return "unary";
        case TransformKind::binary: return "binary";
        case TransformKind::scaler: return "scaler";
    }
    return "";
}

}  // namespace

std::span<const std::string_view> unary_names() { return kUnary; }
std::span<const std::string_view> binary_names() { return kBinary; }
std::span<const std::string_view> scaler_names() { return kScaler; }

std::string_view registry_version() { return "u7b4s3"; }

TransformId make_transform(TransformKind kind, std::string_view name) {
    if (index_of(names_for(kind), name) < 0) {
        raise(Errc::unknown_transform,
              std::string(kind_token(kind)) + " transform '" + std::string(name) + "'");
    }
    return TransformId{kind, std::string(name)};
}

bool is_commutative(const TransformId& id) {
    return id.kind == TransformKind::binary && (id.name == "add" || id.name == "multiply");
}

std::string transform_token(const TransformId& id) {
    return std::string(kind_token(id.kind)) + ":" + id.name;
}

TransformId parse_transform_token(std::string_view token) {
    const auto colon = token.find(':');
    if (colon == std::string_view::npos) {
        raise(Errc::parse_error, "transform token missing kind: '" + std::string(token) + "'");
    }
    const std::string_view kind_str = token.substr(0, colon);
    const std::string_view name = token.substr(colon + 1);
    TransformKind kind;
    if (kind_str == "unary") {
        kind = TransformKind::unary;
    } else if (kind_str == "binary") {
        kind = TransformKind::binary;
    } else if (kind_str == "scaler") {
        kind = TransformKind::scaler;
    } else {
        raise(Errc::parse_error, "unknown transform kind '" + std::string(kind_str) + "'");
    }
    return make_transform(kind, name);
}

std::vector<double> apply_unary(const TransformId& id, std::span<const double> x) {
    if (id.kind != TransformKind::unary) {
        raise(Errc::unknown_transform, "'" + id.name + "' is not a unary transform");
    }
    const int op = index_of(kUnary, id.name);
    if (op < 0) raise(Errc::unknown_transform, "unary '" + id.name + "'");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = unary_value(op, x[i]);
    return out;
}

std::vector<double> apply_binary(const TransformId& id, std::span<const double> a,
                                 std::span<const double> b) {
    if (id.kind != TransformKind::binary) {
        raise(Errc::unknown_transform, "'" + id.name + "' is not a binary transform");
    }
    if (a.size() != b.size()) {
        raise(Errc::length_mismatch, "binary transform arguments differ in length");
    }
    const int op = index_of(kBinary, id.name);
    if (op < 0) raise(Errc::unknown_transform, "binary '" + id.name + "'");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = binary_value(op, a[i], b[i]);
    return out;
}

ScalerParams fit_scaler(const TransformId& id, const std::vector<std::vector<double>>& columns) {
    if (id.kind != TransformKind::scaler) {
        raise(Errc::unknown_transform, "'" + id.name + "' is not a scaler");
    }
    ScalerParams params;
    params.id = id;
    params.columns.reserve(columns.size());
    for (const auto& col : columns) {
        ColumnScale cs;
        if (col.empty()) {
            params.columns.push_back(cs);
            continue;
        }
        if (id.name == "minmax") {
            const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
            cs.offset = *mn;
            cs.scale = *mx - *mn;
        } else if (id.name == "standard") {
            cs.offset = mean(col);
            cs.scale = stddev(col);  // population
        } else {  // robust
            std::vector<double> sorted(col);
            std::sort(sorted.begin(), sorted.end());
            cs.offset = quantile_type7_sorted(sorted, 0.5);
            cs.scale = quantile_type7_sorted(sorted, 0.75) - quantile_type7_sorted(sorted, 0.25);
        }
        if (!(cs.scale > 0.0)) cs.scale = 0.0;  // constant column -> all zeros
        params.columns.push_back(cs);
    }
    return params;
}

std::vector<std::vector<double>> apply_scaler(const ScalerParams& params,
                                              const std::vector<std::vector<double>>& columns) {
    if (params.columns.size() != columns.size()) {
        raise(Errc::length_mismatch, "scaler parameter count does not match column count");
    }
    std::vector<std::vector<double>> out(columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto& cs = params.columns[j];
        out[j].resize(columns[j].size());
        for (std::size_t i = 0; i < columns[j].size(); ++i) {
            out[j][i] = cs.scale > 0.0 ? (columns[j][i] - cs.offset) / cs.scale : 0.0;
        }
    }
    return out;
}

// ---- expression trees ----

TransformExpr TransformExpr::leaf(std::size_t feature_index, std::string feature_name) {
    TransformExpr e;
    auto node = std::make_shared<Node>();
    node->feature_index = feature_index;
    node->feature_name = std::move(feature_name);
    e.node_ = std::move(node);
    return e;
}

TransformExpr TransformExpr::unary(TransformId id, TransformExpr child) {
    if (id.kind != TransformKind::unary) {
        raise(Errc::unknown_transform, "expression node needs a unary transform");
    }
    TransformExpr e;
    auto node = std::make_shared<Node>();
    node->id = std::move(id);
    node->children = {child.node_};
    e.node_ = std::move(node);
    return e;
}

TransformExpr TransformExpr::binary(TransformId id, TransformExpr left, TransformExpr right) {
    if (id.kind != TransformKind::binary) {
        raise(Errc::unknown_transform, "expression node needs a binary transform");
    }
    TransformExpr e;
    auto node = std::make_shared<Node>();
    node->id = std::move(id);
    node->children = {left.node_, right.node_};
    e.node_ = std::move(node);
    return e;
}

std::size_t TransformExpr::order() const {
    struct Walk {
        static std::size_t count(const Node& n) {
            if (n.children.empty()) return 0;
            std::size_t total = 1;
            for (const auto& c : n.children) total += count(*c);
            return total;
        }
    };
    return Walk::count(*node_);
}

std::string TransformExpr::to_string() const {
    struct Walk {
        static void print(const Node& n, std::string& out) {
            if (n.children.empty()) {
                out += "f:";
                out += n.feature_name;
                return;
            }
            out += n.id.name;
            out += '(';
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i > 0) out += ',';
                print(*n.children[i], out);
            }
            out += ')';
        }
    };
    std::string out;
    Walk::print(*node_, out);
    return out;
}

namespace {

struct ExprParser {
    std::string_view text;
    std::size_t pos = 0;
    std::span<const std::string> names;

    char peek() const { return pos < text.size() ? text[pos] : '\0'; }

    [[noreturn]] void fail(const std::string& why) const {
        raise(Errc::parse_error, "expression '" + std::string(text) + "' at offset " +
                                     std::to_string(pos) + ": " + why);
    }

    TransformExpr parse_node() {
        if (text.substr(pos, 2) == "f:") {
            pos += 2;
            const std::size_t start = pos;
            while (pos < text.size() && text[pos] != ',' && text[pos] != ')') pos++;
            const std::string name(text.substr(start, pos - start));
            for (std::size_t j = 0; j < names.size(); ++j) {
                if (names[j] == name) return TransformExpr::leaf(j, name);
            }
            fail("unknown feature '" + name + "'");
        }
        const std::size_t start = pos;
        while (pos < text.size() && text[pos] != '(') pos++;
        if (peek() != '(') fail("expected '('");
        const std::string op(text.substr(start, pos - start));
        pos++;  // consume '('
        TransformExpr first = parse_node();
        if (peek() == ')') {
            pos++;
            return TransformExpr::unary(make_transform(TransformKind::unary, op),
                                        std::move(first));
        }
        if (peek() != ',') fail("expected ',' or ')'");
        pos++;
        TransformExpr second = parse_node();
        if (peek() != ')') fail("expected ')'");
        pos++;
        return TransformExpr::binary(make_transform(TransformKind::binary, op), std::move(first),
                                     std::move(second));
    }
};

}  // namespace

TransformExpr TransformExpr::parse(std::string_view text, std::span<const std::string> names) {
    ExprParser p{text, 0, names};
    TransformExpr e = p.parse_node();
    if (p.pos != text.size()) p.fail("trailing characters");
    return e;
}

std::vector<double> eval_expr(const TransformExpr& expr,
                              const std::vector<std::vector<double>>& columns) {
    if (expr.order() == 0) {
        raise(Errc::invalid_argument, "a bare feature reference is not a generated feature");
    }
    struct Walk {
        const std::vector<std::vector<double>>& cols;
        std::vector<double> eval(const TransformExpr::Node& n) {
            if (n.children.empty()) {
                if (n.feature_index >= cols.size()) {
                    raise(Errc::invalid_argument,
                          "expression leaf '" + n.feature_name + "' is out of range");
                }
                return cols[n.feature_index];
            }
            if (n.children.size() == 1) {
                return apply_unary(n.id, eval(*n.children[0]));
            }
            return apply_binary(n.id, eval(*n.children[0]), eval(*n.children[1]));
        }
    };
    Walk w{columns};
    return w.eval(*expr.node_);
}

std::vector<double> eval_expr(const TransformExpr& expr, const Dataset& d) {
    return eval_expr(expr, d.x);
}

}  // namespace macfe
