#include "macfe/error.hpp"

namespace macfe {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::missing_target: return "MissingTarget";
        case Errc::parse_error: return "ParseError";
        case Errc::too_few_classes: return "TooFewClasses";
        case Errc::class_too_small: return "ClassTooSmall";
        case Errc::no_numeric_features: return "NoNumericFeatures";
        case Errc::empty_feature: return "EmptyFeature";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::too_few_samples: return "TooFewSamples";
        case Errc::too_large: return "TooLarge";
        case Errc::non_finite_transform_output: return "NonFiniteTransformOutput";
        case Errc::unknown_transform: return "UnknownTransform";
        case Errc::empty_corpus: return "EmptyCorpus";
        case Errc::config_mismatch: return "ConfigMismatch";
        case Errc::empty_trm: return "EmptyTrm";
        case Errc::non_square: return "NonSquare";
        case Errc::non_convergence: return "NonConvergence";
        case Errc::bad_threshold: return "BadThreshold";
        case Errc::degenerate_sample: return "DegenerateSample";
        case Errc::io_error: return "IoError";
        case Errc::version_mismatch: return "VersionMismatch";
        case Errc::corrupt_file: return "CorruptFile";
        case Errc::invalid_argument: return "InvalidArgument";
    }
    return "UnknownError";
}

ErrorCategory errc_category(Errc code) noexcept {
    switch (code) {
        case Errc::config_mismatch:
        case Errc::bad_threshold:
        case Errc::invalid_argument:
            return ErrorCategory::config;
        case Errc::missing_target:
        case Errc::parse_error:
        case Errc::too_few_classes:
        case Errc::class_too_small:
        case Errc::no_numeric_features:
        case Errc::empty_feature:
        case Errc::length_mismatch:
        case Errc::too_few_samples:
        case Errc::too_large:
        case Errc::non_finite_transform_output:
        case Errc::unknown_transform:
        case Errc::empty_corpus:
        case Errc::empty_trm:
        case Errc::degenerate_sample:
        case Errc::io_error:
        case Errc::version_mismatch:
        case Errc::corrupt_file:
            return ErrorCategory::data;
        case Errc::non_square:
        case Errc::non_convergence:
            return ErrorCategory::internal;
    }
    return ErrorCategory::internal;
}

}  // namespace macfe
