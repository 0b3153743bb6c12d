/* macfe.h - C API for the MACFE feature-engineering library.
 *
 * All functions returning macfe_status report MACFE_OK (0) on success. On
 * failure they return the error bucket (which doubles as the CLI exit code)
 * and leave a human-readable message retrievable with macfe_last_error() on
 * the calling thread. Objects are opaque handles released with the matching
 * _destroy function; strings returned through char** are released with
 * macfe_free().
 */
#ifndef MACFE_H
#define MACFE_H

#include <stddef.h>

#if defined(_WIN32)
#define MACFE_API __declspec(dllexport)
#else
#define MACFE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum macfe_status {
    MACFE_OK = 0,
    MACFE_ERR_CONFIG = 2, /* bad key, bad value, fingerprint mismatch */
    MACFE_ERR_DATA = 3,   /* unreadable/inconsistent data or model files */
    MACFE_ERR_INTERNAL = 4
} macfe_status;

typedef struct macfe_config macfe_config;
typedef struct macfe_dataset macfe_dataset;
typedef struct macfe_trm macfe_trm;

MACFE_API const char* macfe_version(void);

/* Message for the most recent failure on this thread; never NULL. */
MACFE_API const char* macfe_last_error(void);

MACFE_API void macfe_free(char* s);

/* ---- configuration ---- */

MACFE_API macfe_config* macfe_config_create(void);
MACFE_API void macfe_config_destroy(macfe_config* cfg);
/* Keys: depth select tau gamma bins cap_factor seed folds mic_alpha mic_c
 * threads lambda omega. Unknown keys are config errors. */
MACFE_API macfe_status macfe_config_set(macfe_config* cfg, const char* key, const char* value);
MACFE_API macfe_status macfe_config_get(const macfe_config* cfg, const char* key, char** out);
/* key=value file, '#' comments. */
MACFE_API macfe_status macfe_config_load(macfe_config* cfg, const char* path);
MACFE_API macfe_status macfe_config_format(const macfe_config* cfg, char** out);

/* ---- datasets ---- */

MACFE_API macfe_status macfe_dataset_open_csv(const char* path, const char* target,
                                              macfe_dataset** out);
MACFE_API macfe_status macfe_dataset_preprocess(const macfe_dataset* in, macfe_dataset** out);
MACFE_API size_t macfe_dataset_instances(const macfe_dataset* d);
MACFE_API size_t macfe_dataset_features(const macfe_dataset* d);
MACFE_API size_t macfe_dataset_classes(const macfe_dataset* d);
MACFE_API void macfe_dataset_destroy(macfe_dataset* d);

/* ---- transformation recommendation matrix ---- */

/* Trains over the corpus (datasets are preprocessed internally if needed). */
MACFE_API macfe_status macfe_trm_train(const macfe_dataset* const* corpus, size_t count,
                                       const macfe_config* cfg, macfe_trm** out);
MACFE_API macfe_status macfe_trm_save(const macfe_trm* trm, const char* path);
MACFE_API macfe_status macfe_trm_open(const char* path, macfe_trm** out);
/* kind: "unary", "binary", "scaler" or NULL for the total. */
MACFE_API size_t macfe_trm_records(const macfe_trm* trm, const char* kind);
MACFE_API void macfe_trm_destroy(macfe_trm* trm);

/* ---- workflows ---- */

typedef struct macfe_transform_counts {
    size_t selected_originals;
    size_t generated;
    size_t total;
} macfe_transform_counts;

/* Engineers `data` with the TRM and writes the output CSV plus a JSON lineage
 * sidecar. Either output path may be NULL to skip that file. */
MACFE_API macfe_status macfe_transform(const macfe_dataset* data, const macfe_trm* trm,
                                       const macfe_config* cfg, const char* out_csv,
                                       const char* out_lineage_json,
                                       macfe_transform_counts* counts);

/* Original-vs-engineered CV comparison. Writes the JSON report when out_json
 * is non-NULL; returns the rendered table through table_out when non-NULL. */
MACFE_API macfe_status macfe_evaluate(const macfe_dataset* data, const macfe_trm* trm,
                                      const macfe_config* cfg, const char* out_json,
                                      char** table_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MACFE_H */
