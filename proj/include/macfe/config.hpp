#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "macfe/pipeline.hpp"
#include "macfe/trm.hpp"

namespace macfe {

// Flat key=value configuration shared by the CLI and the C API. Unknown keys
// and out-of-range values are config errors.
struct CliConfig {
    int depth = 2;
    double select = 0.8;      // causal selection fraction
    double tau = 0.5;
    double gamma = 0.05;
    int bins = 10;
    double cap_factor = 2.0;
    std::uint64_t seed = 0;
    int folds = 5;
    double mic_alpha = 0.6;
    int mic_c = 15;
    int threads = 1;
    double lambda = 0.1;      // DAG l1 penalty
    double omega = 0.3;       // DAG pruning threshold

    PipelineConfig pipeline() const;
    TrmTrainConfig trm_train() const;
};

const std::vector<std::string>& config_keys();

// Sets one key, validating name and range.
void config_set(CliConfig& cfg, const std::string& key, const std::string& value);
std::string config_get(const CliConfig& cfg, const std::string& key);

// key=value lines, '#' comments, blank lines ignored.
void config_load_file(CliConfig& cfg, const std::filesystem::path& path);
std::string config_dump(const CliConfig& cfg);

}  // namespace macfe
