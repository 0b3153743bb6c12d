#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "macfe/dataset.hpp"
#include "macfe/meta_features.hpp"
#include "macfe/mic.hpp"
#include "macfe/transforms.hpp"

namespace macfe {

struct TrmRecord {
    TransformKind kind = TransformKind::unary;
    std::vector<double> enc_a;   // feature encoding; meta-feature vector for scaler records
    std::vector<double> enc_b;   // binary records only
    TransformId transform;
    double gain_a = 0.0;         // MIC delta vs first parent (unary/binary)
    double gain_b = 0.0;         // binary only
    std::string source;          // provenance, e.g. "iris/sepal_len"

    bool operator==(const TrmRecord&) const = default;
};

struct TrmTrainConfig {
    int bins = 10;          // histogram bins s
    MicConfig mic;
    double gamma = 0.05;    // outlier threshold for the per-dataset scaler record
    int threads = 1;
};

struct Trm {
    std::vector<TrmRecord> records;
    // Per-component (min, max) over all stored encodings; the first
    // kMetaFeatureCount components also cover dataset encodings.
    std::vector<std::pair<double, double>> norm_stats;
    std::string fingerprint;  // "p=13;s=<bins>;registry=<version>"
    int bins = 10;

    std::size_t count(TransformKind kind) const;
};

std::string make_fingerprint(int bins);

// Alg.-style sweep: per feature the best positive-gain unary transform, per
// unordered feature pair every binary transform whose gain is positive
// against both parents, and one scaler record per dataset. Records are
// canonicalized by provenance order before norm_stats are frozen.
Trm train_trm(const std::vector<Dataset>& corpus, const TrmTrainConfig& cfg = {});

struct UnaryHit {
    TransformId transform;
    double similarity = 0.0;
    std::size_t record_index = 0;
};

struct BinaryHit {
    TransformId transform;
    bool swapped = false;  // apply as t(x_j, x_i)
    double similarity = 0.0;
    std::size_t record_index = 0;
};

// Cosine similarity over min-max-normalized encodings (clipped to [0,1]).
// Returns nothing when the section is empty, the query normalizes to the
// zero vector, or the best similarity is below tau. Ties keep the earliest
// record.
std::optional<UnaryHit> lookup_unary(const Trm& trm, const FeatureEncoding& e, double tau);
std::optional<BinaryHit> lookup_binary(const Trm& trm, const FeatureEncoding& e_i,
                                       const FeatureEncoding& e_j, double tau);
// No threshold: a scaler is always applied. Requires >= 1 scaler record.
TransformId lookup_scaler(const Trm& trm, const DatasetEncoding& de);

// Versioned text format, bit-exact doubles, FNV-1a checksum over the body.
// Unknown or trailing fields are rejected.
void save_trm(const Trm& trm, const std::filesystem::path& path);
Trm load_trm(const std::filesystem::path& path);

}  // namespace macfe
