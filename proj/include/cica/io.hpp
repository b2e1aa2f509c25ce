#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "cica/dataset.hpp"
#include "cica/linalg.hpp"

namespace cica {

enum class MatrixFormat { Csv, Bin };

MatrixFormat parse_matrix_format(std::string_view name);

/// CSV: one sample per line, comma-separated, no header; returned as
/// features x samples. BIN: "CMAT1" magic, u64 rows, u64 cols, row-major f64,
/// stored in the in-memory (features x samples) orientation.
Matrix load_matrix(const std::filesystem::path& path, MatrixFormat format);
void save_matrix(const std::filesystem::path& path, const Matrix& m, MatrixFormat format);

/// One integer class id per line. Blank lines are not allowed.
std::vector<ClassId> load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const std::vector<ClassId>& labels);

}  // namespace cica
