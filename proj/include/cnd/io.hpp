#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cnd {

/// Writes one matrix row per line, comma-separated, 17 significant digits so
/// that reading back reproduces every double exactly.
void write_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path);

/// Reads a rectangular numeric CSV. Blank lines are skipped; ragged rows or
/// non-numeric fields throw InputError with the offending line number.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// Reads a single series: either one row or one column of numbers.
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);

void write_trace_csv(std::span<const double> trace, const std::filesystem::path& path);

}  // namespace cnd
