#include "macfe/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "macfe/error.hpp"
#include "macfe/stats.hpp"

namespace macfe {

namespace {

long long parse_int(const std::string& key, const std::string& value) {
    long long v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
        raise(Errc::invalid_argument, "config key '" + key + "': '" + value + "' is not an integer");
    }
    return v;
}

double parse_real(const std::string& key, const std::string& value) {
    double v = 0.0;
    if (!try_parse_double(value, v)) {
        raise(Errc::invalid_argument, "config key '" + key + "': '" + value + "' is not a number");
    }
    return v;
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) {
        raise(Errc::invalid_argument, "config key '" + key + "' " + what);
    }
}

}  // namespace

PipelineConfig CliConfig::pipeline() const {
    PipelineConfig p;
    p.depth = depth;
    p.s_select = select;
    p.tau = tau;
    p.cap_factor = cap_factor;
    p.gamma = gamma;
    p.bins = bins;
    p.seed = seed;
    p.threads = threads;
    p.mic = {mic_alpha, mic_c};
    p.dag.lambda = lambda;
    p.dag.omega = omega;
    return p;
}

TrmTrainConfig CliConfig::trm_train() const {
    TrmTrainConfig t;
    t.bins = bins;
    t.mic = {mic_alpha, mic_c};
    t.gamma = gamma;
    t.threads = threads;
    return t;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "depth", "select", "tau", "gamma", "bins", "cap_factor", "seed",
        "folds", "mic_alpha", "mic_c", "threads", "lambda", "omega",
    };
    return keys;
}

void config_set(CliConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "depth") {
        const auto v = parse_int(key, value);
        require(v >= 1, key, "must be >= 1");
        cfg.depth = static_cast<int>(v);
    } else if (key == "select") {
        const auto v = parse_real(key, value);
        require(v > 0.0 && v <= 1.0, key, "must lie in (0,1]");
        cfg.select = v;
    } else if (key == "tau") {
        const auto v = parse_real(key, value);
        require(v >= 0.0, key, "must be >= 0");
        cfg.tau = v;
    } else if (key == "gamma") {
        const auto v = parse_real(key, value);
        require(v >= 0.0 && v <= 1.0, key, "must lie in [0,1]");
        cfg.gamma = v;
    } else if (key == "bins") {
        const auto v = parse_int(key, value);
        require(v >= 2 && v <= 10000, key, "must lie in [2,10000]");
        cfg.bins = static_cast<int>(v);
    } else if (key == "cap_factor") {
        const auto v = parse_real(key, value);
        require(v > 0.0, key, "must be > 0");
        cfg.cap_factor = v;
    } else if (key == "seed") {
        const auto v = parse_int(key, value);
        require(v >= 0, key, "must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(v);
    } else if (key == "folds") {
        const auto v = parse_int(key, value);
        require(v >= 2, key, "must be >= 2");
        cfg.folds = static_cast<int>(v);
    } else if (key == "mic_alpha") {
        const auto v = parse_real(key, value);
        require(v > 0.0 && v <= 1.0, key, "must lie in (0,1]");
        cfg.mic_alpha = v;
    } else if (key == "mic_c") {
        const auto v = parse_int(key, value);
        require(v >= 1, key, "must be >= 1");
        cfg.mic_c = static_cast<int>(v);
    } else if (key == "threads") {
        const auto v = parse_int(key, value);
        require(v >= 1 && v <= 1024, key, "must lie in [1,1024]");
        cfg.threads = static_cast<int>(v);
    } else if (key == "lambda") {
        const auto v = parse_real(key, value);
        require(v >= 0.0, key, "must be >= 0");
        cfg.lambda = v;
    } else if (key == "omega") {
        const auto v = parse_real(key, value);
        require(v >= 0.0, key, "must be >= 0");
        cfg.omega = v;
    } else {
        raise(Errc::invalid_argument, "unknown config key '" + key + "'");
    }
}

std::string config_get(const CliConfig& cfg, const std::string& key) {
    if (key == "depth") return std::to_string(cfg.depth);
    if (key == "select") return format_double(cfg.select);
    if (key == "tau") return format_double(cfg.tau);
    if (key == "gamma") return format_double(cfg.gamma);
    if (key == "bins") return std::to_string(cfg.bins);
    if (key == "cap_factor") return format_double(cfg.cap_factor);
    if (key == "seed") return std::to_string(cfg.seed);
    if (key == "folds") return std::to_string(cfg.folds);
    if (key == "mic_alpha") return format_double(cfg.mic_alpha);
    if (key == "mic_c") return std::to_string(cfg.mic_c);
    if (key == "threads") return std::to_string(cfg.threads);
    if (key == "lambda") return format_double(cfg.lambda);
    if (key == "omega") return format_double(cfg.omega);
    raise(Errc::invalid_argument, "unknown config key '" + key + "'");
}

void config_load_file(CliConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::io_error, "cannot open config file '" + path.string() + "'");
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        // trim
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            raise(Errc::invalid_argument, "config line " + std::to_string(line_no) +
                                              " is not key=value: '" + line + "'");
        }
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t");
            return s.substr(b, e - b + 1);
        };
        config_set(cfg, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
}

std::string config_dump(const CliConfig& cfg) {
    std::ostringstream os;
    for (const auto& key : config_keys()) {
        os << key << "=" << config_get(cfg, key) << "\n";
    }
    return os.str();
}

}  // namespace macfe
