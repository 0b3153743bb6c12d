#include "macfe/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "macfe/error.hpp"
#include "macfe/rng.hpp"
#include "macfe/stats.hpp"

namespace macfe {

namespace {

constexpr double kNumericKindThreshold = 0.99;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// One logical CSV record; handles quoted fields, escaped quotes and embedded
// newlines. Returns false on end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        any = true;
        const char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_no;
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c == '\n') {
            ++line_no;
            if (!field.empty() || !fields.empty()) {
                fields.push_back(field);
                return true;
            }
            // skip blank line
            any = false;
            continue;
        } else if (c == '\r') {
            // handled by the following '\n' (or ignored at EOF)
        } else {
            field.push_back(c);
        }
    }
    if (in_quotes) {
        raise(Errc::parse_error, "unterminated quoted field near line " + std::to_string(line_no));
    }
    if (any && (!field.empty() || !fields.empty())) {
        fields.push_back(field);
        return true;
    }
    return false;
}

}  // namespace

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(n_classes(), 0);
    for (int label : y) counts[static_cast<std::size_t>(label)]++;
    return counts;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& target) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(Errc::io_error, "cannot open '" + path.string() + "'");
    }

    std::size_t line_no = 1;
    std::vector<std::string> header;
    if (!read_record(in, header, line_no)) {
        raise(Errc::parse_error, "missing header row in '" + path.string() + "'");
    }
    for (auto& h : header) h = trim(h);

    std::size_t target_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == target) target_col = i;
    }
    if (target_col == header.size()) {
        raise(Errc::missing_target, "column '" + target + "' not in header");
    }

    std::vector<std::vector<std::string>> cells(header.size());
    std::vector<std::string> row;
    while (true) {
        const std::size_t row_line = line_no;
        if (!read_record(in, row, line_no)) break;
        if (row.size() != header.size()) {
            raise(Errc::parse_error, "row at line " + std::to_string(row_line) + " has " +
                                         std::to_string(row.size()) + " fields, expected " +
                                         std::to_string(header.size()));
        }
        for (std::size_t i = 0; i < row.size(); ++i) cells[i].push_back(row[i]);
    }
    const std::size_t n = cells.empty() ? 0 : cells[0].size();
    if (n == 0) {
        raise(Errc::parse_error, "no data rows in '" + path.string() + "'");
    }

    Dataset d;
    d.name = path.stem().string();
    d.target_name = header[target_col];

    // Labels: opaque tokens, ids in first-appearance order.
    std::unordered_map<std::string, int> label_ids;
    d.y.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::string token = trim(cells[target_col][r]);
        if (token.empty()) {
            raise(Errc::parse_error, "empty target cell at data row " + std::to_string(r + 1));
        }
        auto [it, inserted] = label_ids.emplace(token, static_cast<int>(d.label_names.size()));
        if (inserted) d.label_names.push_back(token);
        d.y.push_back(it->second);
    }
    if (d.label_names.size() < 2) {
        raise(Errc::too_few_classes, "target has " + std::to_string(d.label_names.size()) +
                                         " distinct value(s), need at least 2");
    }

    // Column kind: numeric iff >= 99% of non-empty cells parse as finite
    // reals; unparsable cells in numeric columns become missing.
    for (std::size_t cidx = 0; cidx < header.size(); ++cidx) {
        if (cidx == target_col) continue;
        std::size_t non_empty = 0, parsed = 0;
        std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t r = 0; r < n; ++r) {
            const std::string token = trim(cells[cidx][r]);
            if (token.empty()) continue;
            non_empty++;
            double v = 0.0;
            if (try_parse_double(token, v)) {
                parsed++;
                values[r] = v;
            }
        }
        const bool numeric =
            non_empty == 0 ||
            static_cast<double>(parsed) >= kNumericKindThreshold * static_cast<double>(non_empty);
        ColumnInfo info{header[cidx], numeric ? ColumnKind::numeric : ColumnKind::categorical};
        if (!numeric) {
            std::fill(values.begin(), values.end(), std::numeric_limits<double>::quiet_NaN());
        }
        d.columns.push_back(std::move(info));
        d.x.push_back(std::move(values));
    }
    return d;
}

std::pair<Dataset, PreprocessModel> preprocess_fit(const Dataset& d) {
    Dataset out;
    out.name = d.name;
    out.y = d.y;
    out.label_names = d.label_names;
    out.target_name = d.target_name;
    out.preprocessed = true;

    PreprocessModel model;
    for (std::size_t j = 0; j < d.n_features(); ++j) {
        if (d.columns[j].kind != ColumnKind::numeric) continue;
        double sum = 0.0;
        std::size_t observed = 0;
        for (double v : d.x[j]) {
            if (!std::isnan(v)) {
                sum += v;
                observed++;
            }
        }
        if (observed == 0) continue;  // all-missing column dropped
        const double mu = sum / static_cast<double>(observed);
        std::vector<double> col = d.x[j];
        for (double& v : col) {
            if (std::isnan(v)) v = mu;
        }
        out.columns.push_back({d.columns[j].name, ColumnKind::numeric});
        out.x.push_back(std::move(col));
        model.kept_columns.push_back(j);
        model.impute_means.push_back(mu);
    }
    if (out.columns.empty()) {
        raise(Errc::no_numeric_features, "no numeric feature columns remain after preprocessing");
    }
    return {std::move(out), std::move(model)};
}

Dataset preprocess(const Dataset& d) { return preprocess_fit(d).first; }

Dataset preprocess_apply(const PreprocessModel& model, const Dataset& d) {
    Dataset out;
    out.name = d.name;
    out.y = d.y;
    out.label_names = d.label_names;
    out.target_name = d.target_name;
    out.preprocessed = true;
    for (std::size_t i = 0; i < model.kept_columns.size(); ++i) {
        const std::size_t j = model.kept_columns[i];
        if (j >= d.n_features()) {
            raise(Errc::config_mismatch, "preprocess model does not fit dataset layout");
        }
        std::vector<double> col = d.x[j];
        for (double& v : col) {
            if (std::isnan(v)) v = model.impute_means[i];
        }
        out.columns.push_back({d.columns[j].name, ColumnKind::numeric});
        out.x.push_back(std::move(col));
    }
    if (out.columns.empty()) {
        raise(Errc::no_numeric_features, "preprocess model kept no columns");
    }
    return out;
}

FoldPlan stratified_folds(const Dataset& d, int k, std::uint64_t seed) {
    if (k < 2) {
        raise(Errc::invalid_argument, "fold count must be at least 2, got " + std::to_string(k));
    }
    const auto counts = d.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] < static_cast<std::size_t>(k)) {
            raise(Errc::class_too_small, "class '" + d.label_names[c] + "' has " +
                                             std::to_string(counts[c]) + " instances, need >= " +
                                             std::to_string(k));
        }
    }

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.folds.assign(static_cast<std::size_t>(k), {});

    Rng rng(seed);
    std::size_t offset = 0;  // rotates per class so total fold sizes stay balanced
    for (std::size_t c = 0; c < d.n_classes(); ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < d.y.size(); ++i) {
            if (d.y[i] == static_cast<int>(c)) members.push_back(i);
        }
        rng.shuffle(members);
        for (std::size_t pos = 0; pos < members.size(); ++pos) {
            plan.folds[(offset + pos) % static_cast<std::size_t>(k)].push_back(members[pos]);
        }
        offset = (offset + members.size()) % static_cast<std::size_t>(k);
    }
    for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
    return plan;
}

Dataset subset_rows(const Dataset& d, std::span<const std::size_t> rows) {
    Dataset out;
    out.name = d.name;
    out.columns = d.columns;
    out.label_names = d.label_names;
    out.target_name = d.target_name;
    out.preprocessed = d.preprocessed;
    out.x.resize(d.n_features());
    for (std::size_t j = 0; j < d.n_features(); ++j) {
        out.x[j].reserve(rows.size());
        for (std::size_t r : rows) out.x[j].push_back(d.x[j][r]);
    }
    out.y.reserve(rows.size());
    for (std::size_t r : rows) out.y.push_back(d.y[r]);
    return out;
}

Dataset make_dataset(std::string name, std::vector<std::string> column_names,
                     std::vector<std::vector<double>> columns, std::vector<int> labels,
                     std::vector<std::string> label_names, std::string target_name,
                     bool preprocessed_flag) {
    if (column_names.size() != columns.size()) {
        raise(Errc::length_mismatch, "column name/data count mismatch");
    }
    for (const auto& col : columns) {
        if (col.size() != labels.size()) {
            raise(Errc::length_mismatch, "column length does not match label count");
        }
    }
    if (label_names.size() < 2) {
        raise(Errc::too_few_classes, "need at least 2 classes");
    }
    std::vector<std::size_t> counts(label_names.size(), 0);
    for (int label : labels) {
        if (label < 0 || static_cast<std::size_t>(label) >= label_names.size()) {
            raise(Errc::invalid_argument, "label id out of range");
        }
        counts[static_cast<std::size_t>(label)]++;
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) {
            raise(Errc::too_few_classes, "class '" + label_names[c] + "' has no instances");
        }
    }
    Dataset d;
    d.name = std::move(name);
    for (auto& cn : column_names) d.columns.push_back({std::move(cn), ColumnKind::numeric});
    d.x = std::move(columns);
    d.y = std::move(labels);
    d.label_names = std::move(label_names);
    d.target_name = std::move(target_name);
    d.preprocessed = preprocessed_flag;
    return d;
}

}  // namespace macfe
