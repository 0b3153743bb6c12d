#include "macfe/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "macfe/diag.hpp"
#include "macfe/error.hpp"
#include "macfe/stats.hpp"

#include "json.hpp"

namespace macfe {

namespace {

constexpr double kDedupCorrelation = 0.999;

bool is_constant(std::span<const double> v) {
    for (double x : v) {
        if (x != v[0]) return false;
    }
    return true;
}

// Working state during generation: one entry per live column.
struct WorkingColumn {
    TransformExpr expr;          // valid only for generated columns
    bool generated = false;
    std::size_t base_index = 0;  // index into the selected-original matrix
    std::string name;
    std::vector<double> values;
};

Dataset working_view(const Dataset& base, const std::vector<WorkingColumn>& cols) {
    Dataset view;
    view.name = base.name;
    view.y = base.y;
    view.label_names = base.label_names;
    view.target_name = base.target_name;
    view.preprocessed = true;
    for (const auto& wc : cols) {
        view.columns.push_back({wc.name, ColumnKind::numeric});
        view.x.push_back(wc.values);
    }
    return view;
}

TransformExpr expr_of(const WorkingColumn& wc) {
    if (wc.generated) return wc.expr;
    return TransformExpr::leaf(wc.base_index, wc.name);
}

}  // namespace

bool dedup_accept(std::span<const double> candidate,
                  const std::vector<std::vector<double>>& existing) {
    if (candidate.empty() || is_constant(candidate)) return false;
    for (const auto& col : existing) {
        if (col.size() != candidate.size()) {
            raise(Errc::length_mismatch, "dedup candidate length mismatch");
        }
        if (std::equal(col.begin(), col.end(), candidate.begin())) return false;
        if (std::abs(pearson(candidate, col)) > kDedupCorrelation) return false;
    }
    return true;
}

EngineeredDataset transform_dataset(const Dataset& d, const Trm& trm, const PipelineConfig& cfg) {
    if (!d.preprocessed) {
        raise(Errc::invalid_argument, "transform_dataset requires a preprocessed dataset");
    }
    if (cfg.depth < 1) {
        raise(Errc::invalid_argument, "depth must be at least 1");
    }
    if (!(cfg.cap_factor > 0.0)) {
        raise(Errc::invalid_argument, "cap_factor must be positive");
    }
    if (trm.fingerprint != make_fingerprint(cfg.bins)) {
        raise(Errc::config_mismatch, "TRM fingerprint '" + trm.fingerprint +
                                         "' does not match configuration '" +
                                         make_fingerprint(cfg.bins) + "'");
    }

    EngineeredDataset out;
    out.original_feature_count = d.n_features();

    // causal pre-selection on the original features
    DagOptions dag_opts = cfg.dag;
    const WeightedDAG dag = fit_dag(d, dag_opts);
    out.selected = select_top(rank_features(dag), cfg.s_select);

    out.base.name = d.name;
    out.base.y = d.y;
    out.base.label_names = d.label_names;
    out.base.target_name = d.target_name;
    out.base.preprocessed = true;
    for (std::size_t idx : out.selected) {
        out.base.columns.push_back(d.columns[idx]);
        out.base.x.push_back(d.x[idx]);
    }

    const std::size_t cap = static_cast<std::size_t>(
        std::ceil(cfg.cap_factor * static_cast<double>(d.n_features())));

    std::vector<WorkingColumn> cols;
    for (std::size_t i = 0; i < out.base.n_features(); ++i) {
        WorkingColumn wc;
        wc.generated = false;
        wc.base_index = i;
        wc.name = out.base.columns[i].name;
        wc.values = out.base.x[i];
        cols.push_back(std::move(wc));
    }

    bool cap_noted = false;
    const auto try_append = [&](TransformExpr expr, std::vector<double> values, double similarity,
                                int round) {
        if (out.generated.size() >= cap) {
            if (!cap_noted) {
                out.notes.push_back("generation cap of " + std::to_string(cap) +
                                    " columns reached at depth " + std::to_string(round));
                cap_noted = true;
            }
            return;
        }
        std::vector<std::vector<double>> existing;
        existing.reserve(cols.size());
        for (const auto& wc : cols) existing.push_back(wc.values);
        if (!dedup_accept(values, existing)) return;
        WorkingColumn wc;
        wc.generated = true;
        wc.expr = expr;
        wc.name = expr.to_string();
        wc.values = values;
        cols.push_back(std::move(wc));
        out.generated.push_back({std::move(expr), std::move(values), similarity, round});
    };

    for (int round = 1; round <= cfg.depth; ++round) {
        const MetaFeatureVector mf = extract_meta_features(working_view(out.base, cols));

        // unary phase over the round-start feature set
        {
            const std::size_t snapshot = cols.size();
            for (std::size_t i = 0; i < snapshot; ++i) {
                const auto enc =
                    encode_feature(mf, cols[i].values, d.name, cols[i].name, cfg.bins);
                const auto hit = lookup_unary(trm, enc, cfg.tau);
                if (!hit) continue;
                auto values = apply_unary(hit->transform, cols[i].values);
                try_append(TransformExpr::unary(hit->transform, expr_of(cols[i])),
                           std::move(values), hit->similarity, round);
            }
        }

        // binary phase sees this round's unary outputs as well
        {
            const std::size_t snapshot = cols.size();
            std::vector<FeatureEncoding> enc(snapshot);
            for (std::size_t i = 0; i < snapshot; ++i) {
                enc[i] = encode_feature(mf, cols[i].values, d.name, cols[i].name, cfg.bins);
            }
            for (std::size_t i = 0; i < snapshot; ++i) {
                for (std::size_t j = i + 1; j < snapshot; ++j) {
                    const auto hit = lookup_binary(trm, enc[i], enc[j], cfg.tau);
                    if (!hit) continue;
                    const auto& first = hit->swapped ? cols[j] : cols[i];
                    const auto& second = hit->swapped ? cols[i] : cols[j];
                    auto values = apply_binary(hit->transform, first.values, second.values);
                    try_append(TransformExpr::binary(hit->transform, expr_of(first),
                                                     expr_of(second)),
                               std::move(values), hit->similarity, round);
                }
            }
        }
    }

    // final scaling step, keyed by the engineered dataset's encoding
    const Dataset final_view = working_view(out.base, cols);
    const TransformId scaler_id = lookup_scaler(trm, encode_dataset(final_view));
    diag::log_fit_rows(final_view.n_instances());
    out.scaler = fit_scaler(scaler_id, final_view.x);
    return out;
}

std::vector<std::string> EngineeredDataset::column_names() const {
    std::vector<std::string> names;
    names.reserve(base.n_features() + generated.size());
    for (const auto& c : base.columns) names.push_back(c.name);
    for (const auto& g : generated) names.push_back(g.expr.to_string());
    return names;
}

std::vector<std::vector<double>> EngineeredDataset::unscaled_columns() const {
    std::vector<std::vector<double>> cols;
    cols.reserve(base.n_features() + generated.size());
    for (const auto& c : base.x) cols.push_back(c);
    for (const auto& g : generated) cols.push_back(g.values);
    return cols;
}

std::vector<std::vector<double>> EngineeredDataset::scaled_columns() const {
    return apply_scaler(scaler, unscaled_columns());
}

std::vector<std::vector<double>> apply_plan(const EngineeredDataset& plan, const Dataset& fresh) {
    if (!fresh.preprocessed) {
        raise(Errc::invalid_argument, "apply_plan requires a preprocessed dataset");
    }
    std::vector<std::vector<double>> selected;
    selected.reserve(plan.selected.size());
    for (std::size_t idx : plan.selected) {
        if (idx >= fresh.n_features()) {
            raise(Errc::config_mismatch, "plan does not fit the dataset layout");
        }
        selected.push_back(fresh.x[idx]);
    }
    std::vector<std::vector<double>> cols = selected;
    for (const auto& g : plan.generated) {
        cols.push_back(eval_expr(g.expr, selected));
    }
    return apply_scaler(plan.scaler, cols);
}

std::string lineage_json(const EngineeredDataset& e, const PipelineConfig& cfg) {
    nlohmann::ordered_json doc;
    doc["dataset"] = e.base.name;
    doc["original_features"] = e.original_feature_count;
    nlohmann::ordered_json selected = nlohmann::ordered_json::array();
    for (const auto& c : e.base.columns) selected.push_back(c.name);
    doc["selected_originals"] = std::move(selected);
    nlohmann::ordered_json generated = nlohmann::ordered_json::array();
    for (const auto& g : e.generated) {
        nlohmann::ordered_json item;
        item["expr"] = g.expr.to_string();
        item["order"] = g.expr.order();
        item["similarity"] = g.similarity;
        item["round"] = g.round;
        generated.push_back(std::move(item));
    }
    doc["generated"] = std::move(generated);
    doc["scaler"] = transform_token(e.scaler.id);
    doc["notes"] = e.notes;
    nlohmann::ordered_json config;
    config["depth"] = cfg.depth;
    config["select"] = cfg.s_select;
    config["tau"] = cfg.tau;
    config["cap_factor"] = cfg.cap_factor;
    config["bins"] = cfg.bins;
    doc["config"] = std::move(config);
    return doc.dump(2);
}

namespace {

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

void write_engineered_csv(const EngineeredDataset& e, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        raise(Errc::io_error, "cannot write '" + path.string() + "'");
    }
    const auto names = e.column_names();
    const auto cols = e.scaled_columns();
    for (const auto& name : names) out << csv_quote(name) << ',';
    out << csv_quote(e.base.target_name) << '\n';
    for (std::size_t row = 0; row < e.base.n_instances(); ++row) {
        for (const auto& col : cols) out << format_double(col[row]) << ',';
        out << csv_quote(e.base.label_names[static_cast<std::size_t>(e.base.y[row])]) << '\n';
    }
    out.flush();
    if (!out) {
        raise(Errc::io_error, "write failed for '" + path.string() + "'");
    }
}

}  // namespace macfe
