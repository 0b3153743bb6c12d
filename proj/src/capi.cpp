#include "macfe.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "macfe/config.hpp"
#include "macfe/dataset.hpp"
#include "macfe/error.hpp"
#include "macfe/eval.hpp"
#include "macfe/pipeline.hpp"
#include "macfe/trm.hpp"

struct macfe_config {
    macfe::CliConfig cfg;
};

struct macfe_dataset {
    macfe::Dataset d;
};

struct macfe_trm {
    macfe::Trm t;
};

namespace {

thread_local std::string g_last_error;

macfe_status to_status(macfe::ErrorCategory category) {
    switch (category) {
        case macfe::ErrorCategory::config: return MACFE_ERR_CONFIG;
        case macfe::ErrorCategory::data: return MACFE_ERR_DATA;
        case macfe::ErrorCategory::internal: return MACFE_ERR_INTERNAL;
    }
    return MACFE_ERR_INTERNAL;
}

template <class Fn>
macfe_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        g_last_error.clear();
        return MACFE_OK;
    } catch (const macfe::Error& e) {
        g_last_error = e.what();
        return to_status(e.category());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MACFE_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return MACFE_ERR_INTERNAL;
    }
}

macfe_status fail_config(const char* message) noexcept {
    g_last_error = message;
    return MACFE_ERR_CONFIG;
}

char* copy_out(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Engineering requires preprocessed data; handles opened from raw CSVs are
// preprocessed on the fly (idempotent).
macfe::Dataset preprocessed_view(const macfe::Dataset& d) {
    return d.preprocessed ? d : macfe::preprocess(d);
}

}  // namespace

extern "C" {

const char* macfe_version(void) { return "1.0.0"; }

const char* macfe_last_error(void) { return g_last_error.c_str(); }

void macfe_free(char* s) { std::free(s); }

macfe_config* macfe_config_create(void) { return new (std::nothrow) macfe_config(); }

void macfe_config_destroy(macfe_config* cfg) { delete cfg; }

macfe_status macfe_config_set(macfe_config* cfg, const char* key, const char* value) {
    if (cfg == nullptr || key == nullptr || value == nullptr) {
        return fail_config("macfe_config_set: null argument");
    }
    return guarded([&] { macfe::config_set(cfg->cfg, key, value); });
}

macfe_status macfe_config_get(const macfe_config* cfg, const char* key, char** out) {
    if (cfg == nullptr || key == nullptr || out == nullptr) {
        return fail_config("macfe_config_get: null argument");
    }
    return guarded([&] { *out = copy_out(macfe::config_get(cfg->cfg, key)); });
}

macfe_status macfe_config_load(macfe_config* cfg, const char* path) {
    if (cfg == nullptr || path == nullptr) {
        return fail_config("macfe_config_load: null argument");
    }
    return guarded([&] { macfe::config_load_file(cfg->cfg, path); });
}

macfe_status macfe_config_format(const macfe_config* cfg, char** out) {
    if (cfg == nullptr || out == nullptr) {
        return fail_config("macfe_config_format: null argument");
    }
    return guarded([&] { *out = copy_out(macfe::config_dump(cfg->cfg)); });
}

macfe_status macfe_dataset_open_csv(const char* path, const char* target, macfe_dataset** out) {
    if (path == nullptr || target == nullptr || out == nullptr) {
        return fail_config("macfe_dataset_open_csv: null argument");
    }
    return guarded([&] { *out = new macfe_dataset{macfe::load_csv(path, target)}; });
}

macfe_status macfe_dataset_preprocess(const macfe_dataset* in, macfe_dataset** out) {
    if (in == nullptr || out == nullptr) {
        return fail_config("macfe_dataset_preprocess: null argument");
    }
    return guarded([&] { *out = new macfe_dataset{macfe::preprocess(in->d)}; });
}

size_t macfe_dataset_instances(const macfe_dataset* d) {
    return d == nullptr ? 0 : d->d.n_instances();
}

size_t macfe_dataset_features(const macfe_dataset* d) {
    return d == nullptr ? 0 : d->d.n_features();
}

size_t macfe_dataset_classes(const macfe_dataset* d) {
    return d == nullptr ? 0 : d->d.n_classes();
}

void macfe_dataset_destroy(macfe_dataset* d) { delete d; }

macfe_status macfe_trm_train(const macfe_dataset* const* corpus, size_t count,
                             const macfe_config* cfg, macfe_trm** out) {
    if (corpus == nullptr || cfg == nullptr || out == nullptr) {
        return fail_config("macfe_trm_train: null argument");
    }
    return guarded([&] {
        std::vector<macfe::Dataset> datasets;
        datasets.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            if (corpus[i] == nullptr) {
                macfe::raise(macfe::Errc::invalid_argument, "corpus entry is null");
            }
            datasets.push_back(preprocessed_view(corpus[i]->d));
        }
        *out = new macfe_trm{macfe::train_trm(datasets, cfg->cfg.trm_train())};
    });
}

macfe_status macfe_trm_save(const macfe_trm* trm, const char* path) {
    if (trm == nullptr || path == nullptr) {
        return fail_config("macfe_trm_save: null argument");
    }
    return guarded([&] { macfe::save_trm(trm->t, path); });
}

macfe_status macfe_trm_open(const char* path, macfe_trm** out) {
    if (path == nullptr || out == nullptr) {
        return fail_config("macfe_trm_open: null argument");
    }
    return guarded([&] { *out = new macfe_trm{macfe::load_trm(path)}; });
}

size_t macfe_trm_records(const macfe_trm* trm, const char* kind) {
    if (trm == nullptr) return 0;
    if (kind == nullptr) return trm->t.records.size();
    const std::string k = kind;
    if (k == "unary") return trm->t.count(macfe::TransformKind::unary);
    if (k == "binary") return trm->t.count(macfe::TransformKind::binary);
    if (k == "scaler") return trm->t.count(macfe::TransformKind::scaler);
    return 0;
}

void macfe_trm_destroy(macfe_trm* trm) { delete trm; }

macfe_status macfe_transform(const macfe_dataset* data, const macfe_trm* trm,
                             const macfe_config* cfg, const char* out_csv,
                             const char* out_lineage_json, macfe_transform_counts* counts) {
    if (data == nullptr || trm == nullptr || cfg == nullptr) {
        return fail_config("macfe_transform: null argument");
    }
    return guarded([&] {
        const macfe::Dataset d = preprocessed_view(data->d);
        const macfe::PipelineConfig pcfg = cfg->cfg.pipeline();
        const macfe::EngineeredDataset engineered = macfe::transform_dataset(d, trm->t, pcfg);
        if (out_csv != nullptr) {
            macfe::write_engineered_csv(engineered, out_csv);
        }
        if (out_lineage_json != nullptr) {
            std::ofstream sidecar(out_lineage_json, std::ios::binary | std::ios::trunc);
            if (!sidecar) {
                macfe::raise(macfe::Errc::io_error,
                             "cannot write '" + std::string(out_lineage_json) + "'");
            }
            sidecar << macfe::lineage_json(engineered, pcfg) << "\n";
        }
        if (counts != nullptr) {
            counts->selected_originals = engineered.base.n_features();
            counts->generated = engineered.generated.size();
            counts->total = engineered.base.n_features() + engineered.generated.size();
        }
    });
}

macfe_status macfe_evaluate(const macfe_dataset* data, const macfe_trm* trm,
                            const macfe_config* cfg, const char* out_json, char** table_out) {
    if (data == nullptr || trm == nullptr || cfg == nullptr) {
        return fail_config("macfe_evaluate: null argument");
    }
    return guarded([&] {
        const macfe::EvalReport report = macfe::compare(data->d, trm->t, cfg->cfg.pipeline(),
                                                        cfg->cfg.folds, cfg->cfg.seed);
        if (out_json != nullptr) {
            std::ofstream out(out_json, std::ios::binary | std::ios::trunc);
            if (!out) {
                macfe::raise(macfe::Errc::io_error,
                             "cannot write '" + std::string(out_json) + "'");
            }
            out << macfe::report_json(report) << "\n";
        }
        if (table_out != nullptr) {
            *table_out = copy_out(macfe::render_table(report));
        }
    });
}

}  // extern "C"
