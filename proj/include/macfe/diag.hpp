#pragma once

#include <cstddef>
#include <vector>

namespace macfe::diag {

// Row counts seen by fitting code paths (imputation, scaler, DAG and
// classifier fits). Tests enable the log around compare() and assert that no
// fit ever saw a full dataset, i.e. test rows stayed out of fitting paths.
void enable_fit_log(bool on);
void clear_fit_log();
std::vector<std::size_t> fit_log();
void log_fit_rows(std::size_t rows);

}  // namespace macfe::diag
