// macfe command-line interface. Talks to the core exclusively through the
// C API in macfe.h; exit codes are the macfe_status values (0 ok, 2 config,
// 3 data, 4 internal).

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "macfe.h"

namespace {

namespace fs = std::filesystem;

struct ConfigHandle {
    macfe_config* ptr = macfe_config_create();
    ~ConfigHandle() { macfe_config_destroy(ptr); }
};

struct DatasetHandle {
    macfe_dataset* ptr = nullptr;
    ~DatasetHandle() { macfe_dataset_destroy(ptr); }
};

struct TrmHandle {
    macfe_trm* ptr = nullptr;
    ~TrmHandle() { macfe_trm_destroy(ptr); }
};

int report_failure(macfe_status status) {
    std::cerr << "error: " << macfe_last_error() << "\n";
    return static_cast<int>(status);
}

// Per-flag overrides applied after the optional config file.
struct Overrides {
    std::map<std::string, std::string> values;

    void add_flag(CLI::App* cmd, const std::string& flag, const std::string& key,
                  const std::string& help) {
        cmd->add_option_function<std::string>(
               flag, [this, key](const std::string& v) { values[key] = v; }, help)
            ->type_name("VALUE");
    }
};

int apply_config(macfe_config* cfg, const std::string& config_path, const Overrides& overrides) {
    if (!config_path.empty()) {
        if (const auto st = macfe_config_load(cfg, config_path.c_str()); st != MACFE_OK) {
            return report_failure(st);
        }
    }
    for (const auto& [key, value] : overrides.values) {
        if (const auto st = macfe_config_set(cfg, key.c_str(), value.c_str()); st != MACFE_OK) {
            return report_failure(st);
        }
    }
    return 0;
}

// target-map file: one `csv-file-name=target-column` per line, '#' comments.
int load_target_map(const std::string& path, std::map<std::string, std::string>& out) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open target map '" << path << "'\n";
        return MACFE_ERR_CONFIG;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: target map line " << line_no << " is not key=value\n";
            return MACFE_ERR_CONFIG;
        }
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return 0;
}

int cmd_train(const std::string& data_dir, const std::string& target_map_path,
              const std::string& out_path, const std::string& config_path,
              const Overrides& overrides) {
    ConfigHandle cfg;
    if (const int rc = apply_config(cfg.ptr, config_path, overrides); rc != 0) return rc;

    std::map<std::string, std::string> target_map;
    if (const int rc = load_target_map(target_map_path, target_map); rc != 0) return rc;

    std::vector<fs::path> csvs;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(data_dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            csvs.push_back(entry.path());
        }
    }
    if (ec) {
        std::cerr << "error: cannot read directory '" << data_dir << "': " << ec.message() << "\n";
        return MACFE_ERR_DATA;
    }
    std::sort(csvs.begin(), csvs.end());
    if (csvs.empty()) {
        std::cerr << "error: no CSV files in '" << data_dir << "'\n";
        return MACFE_ERR_DATA;
    }

    std::vector<std::unique_ptr<DatasetHandle>> datasets;
    std::vector<const macfe_dataset*> raw;
    for (const auto& path : csvs) {
        const auto it = target_map.find(path.filename().string());
        if (it == target_map.end()) {
            std::cerr << "error: target map has no entry for '" << path.filename().string()
                      << "'\n";
            return MACFE_ERR_CONFIG;
        }
        auto handle = std::make_unique<DatasetHandle>();
        if (const auto st =
                macfe_dataset_open_csv(path.string().c_str(), it->second.c_str(), &handle->ptr);
            st != MACFE_OK) {
            return report_failure(st);
        }
        raw.push_back(handle->ptr);
        datasets.push_back(std::move(handle));
    }

    TrmHandle trm;
    if (const auto st = macfe_trm_train(raw.data(), raw.size(), cfg.ptr, &trm.ptr);
        st != MACFE_OK) {
        return report_failure(st);
    }
    if (const auto st = macfe_trm_save(trm.ptr, out_path.c_str()); st != MACFE_OK) {
        return report_failure(st);
    }
    std::cout << "trained TRM over " << raw.size() << " dataset(s)\n"
              << "  unary records:  " << macfe_trm_records(trm.ptr, "unary") << "\n"
              << "  binary records: " << macfe_trm_records(trm.ptr, "binary") << "\n"
              << "  scaler records: " << macfe_trm_records(trm.ptr, "scaler") << "\n"
              << "wrote " << out_path << "\n";
    return 0;
}

int cmd_transform(const std::string& trm_path, const std::string& input,
                  const std::string& target, const std::string& out_csv,
                  const std::string& lineage, const std::string& config_path,
                  const Overrides& overrides) {
    ConfigHandle cfg;
    if (const int rc = apply_config(cfg.ptr, config_path, overrides); rc != 0) return rc;

    TrmHandle trm;
    if (const auto st = macfe_trm_open(trm_path.c_str(), &trm.ptr); st != MACFE_OK) {
        return report_failure(st);
    }
    DatasetHandle data;
    if (const auto st = macfe_dataset_open_csv(input.c_str(), target.c_str(), &data.ptr);
        st != MACFE_OK) {
        return report_failure(st);
    }
    const std::string lineage_path = lineage.empty() ? out_csv + ".lineage.json" : lineage;
    macfe_transform_counts counts{};
    if (const auto st = macfe_transform(data.ptr, trm.ptr, cfg.ptr, out_csv.c_str(),
                                        lineage_path.c_str(), &counts);
        st != MACFE_OK) {
        return report_failure(st);
    }
    std::cout << "selected originals: " << counts.selected_originals << "\n"
              << "generated features: " << counts.generated << "\n"
              << "total features:     " << counts.total << "\n"
              << "wrote " << out_csv << " and " << lineage_path << "\n";
    return 0;
}

int cmd_evaluate(const std::string& trm_path, const std::string& input, const std::string& target,
                 const std::string& out_json, const std::string& config_path,
                 const Overrides& overrides) {
    ConfigHandle cfg;
    if (const int rc = apply_config(cfg.ptr, config_path, overrides); rc != 0) return rc;

    TrmHandle trm;
    if (const auto st = macfe_trm_open(trm_path.c_str(), &trm.ptr); st != MACFE_OK) {
        return report_failure(st);
    }
    DatasetHandle data;
    if (const auto st = macfe_dataset_open_csv(input.c_str(), target.c_str(), &data.ptr);
        st != MACFE_OK) {
        return report_failure(st);
    }
    const std::string json_path =
        out_json.empty() ? fs::path(input).stem().string() + ".report.json" : out_json;
    char* table = nullptr;
    if (const auto st = macfe_evaluate(data.ptr, trm.ptr, cfg.ptr, json_path.c_str(), &table);
        st != MACFE_OK) {
        return report_failure(st);
    }
    std::cout << table;
    macfe_free(table);
    std::cout << "wrote " << json_path << "\n";
    return 0;
}

int cmd_print_config(const std::string& config_path, const Overrides& overrides) {
    ConfigHandle cfg;
    if (const int rc = apply_config(cfg.ptr, config_path, overrides); rc != 0) return rc;
    char* text = nullptr;
    if (const auto st = macfe_config_format(cfg.ptr, &text); st != MACFE_OK) {
        return report_failure(st);
    }
    std::cout << text;
    macfe_free(text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MACFE: meta-learning and causality based feature engineering"};
    app.require_subcommand(1);
    app.set_version_flag("--version", []() { return std::string(macfe_version()); });

    std::string config_path;

    Overrides overrides;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value configuration file");
        overrides.add_flag(cmd, "--seed", "seed", "random seed (default 0)");
        overrides.add_flag(cmd, "--threads", "threads", "worker cap (default 1)");
        overrides.add_flag(cmd, "--bins", "bins", "histogram bins s (default 10)");
        overrides.add_flag(cmd, "--gamma", "gamma", "outlier threshold (default 0.05)");
        overrides.add_flag(cmd, "--mic-alpha", "mic_alpha", "MIC budget exponent (default 0.6)");
        overrides.add_flag(cmd, "--mic-c", "mic_c", "MIC clump factor (default 15)");
    };

    // train
    auto* train = app.add_subcommand("train", "train a TRM over a directory of CSV datasets");
    std::string data_dir, target_map, trm_out;
    train->add_option("--data-dir", data_dir, "directory of training CSVs")->required();
    train->add_option("--target-map", target_map,
                      "file mapping csv names to target columns (name.csv=target)")
        ->required();
    train->add_option("--out", trm_out, "output TRM file")->required();
    add_common(train);

    // transform
    auto* transform = app.add_subcommand("transform", "engineer features for one CSV");
    std::string trm_path, input, target, out_csv, lineage_path;
    transform->add_option("--trm", trm_path, "trained TRM file")->required();
    transform->add_option("--input", input, "input CSV")->required();
    transform->add_option("--target", target, "target column name")->required();
    transform->add_option("--out", out_csv, "output CSV")->required();
    transform->add_option("--lineage", lineage_path,
                          "lineage sidecar path (default <out>.lineage.json)");
    overrides.add_flag(transform, "--depth", "depth", "composition depth d (default 2)");
    overrides.add_flag(transform, "--select", "select", "causal selection fraction (default 0.8)");
    overrides.add_flag(transform, "--tau", "tau", "similarity threshold (default 0.5)");
    overrides.add_flag(transform, "--cap-factor", "cap_factor",
                       "generated-column cap factor (default 2.0)");
    add_common(transform);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "original-vs-engineered CV comparison");
    std::string eval_trm, eval_input, eval_target, out_json;
    evaluate->add_option("--trm", eval_trm, "trained TRM file")->required();
    evaluate->add_option("--input", eval_input, "input CSV")->required();
    evaluate->add_option("--target", eval_target, "target column name")->required();
    evaluate->add_option("--out", out_json, "JSON report path (default <input>.report.json)");
    overrides.add_flag(evaluate, "--k", "folds", "CV folds (default 5)");
    overrides.add_flag(evaluate, "--depth", "depth", "composition depth d (default 2)");
    overrides.add_flag(evaluate, "--select", "select", "causal selection fraction (default 0.8)");
    overrides.add_flag(evaluate, "--tau", "tau", "similarity threshold (default 0.5)");
    add_common(evaluate);

    // print-config
    auto* print_config = app.add_subcommand("print-config", "print the effective configuration");
    overrides.add_flag(print_config, "--depth", "depth", "composition depth d");
    overrides.add_flag(print_config, "--select", "select", "causal selection fraction");
    overrides.add_flag(print_config, "--tau", "tau", "similarity threshold");
    overrides.add_flag(print_config, "--cap-factor", "cap_factor", "generated-column cap factor");
    overrides.add_flag(print_config, "--k", "folds", "CV folds");
    add_common(print_config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : MACFE_ERR_CONFIG;  // help/version exit 0, parse errors exit 2
    }

    if (train->parsed()) {
        return cmd_train(data_dir, target_map, trm_out, config_path, overrides);
    }
    if (transform->parsed()) {
        return cmd_transform(trm_path, input, target, out_csv, lineage_path, config_path,
                             overrides);
    }
    if (evaluate->parsed()) {
        return cmd_evaluate(eval_trm, eval_input, eval_target, out_json, config_path, overrides);
    }
    if (print_config->parsed()) {
        return cmd_print_config(config_path, overrides);
    }
    return MACFE_ERR_CONFIG;
}
