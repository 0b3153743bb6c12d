#pragma once

#include <stdexcept>
#include <string>

namespace macfe {

enum class Errc {
    missing_target,
    parse_error,
    too_few_classes,
    class_too_small,
    no_numeric_features,
    empty_feature,
    length_mismatch,
    too_few_samples,
    too_large,
    non_finite_transform_output,
    unknown_transform,
    empty_corpus,
    config_mismatch,
    empty_trm,
    non_square,
    non_convergence,
    bad_threshold,
    degenerate_sample,
    io_error,
    version_mismatch,
    corrupt_file,
    invalid_argument,
};

// Coarse buckets used by the C API status codes and the CLI exit codes.
enum class ErrorCategory { config, data, internal };

const char* errc_name(Errc code) noexcept;
ErrorCategory errc_category(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return errc_category(code_); }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, std::string message) {
    throw Error(code, std::move(message));
}

}  // namespace macfe
