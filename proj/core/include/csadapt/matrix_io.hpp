#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "csadapt/matrix.hpp"

namespace csadapt {

// Matrix CSV: one row per line, comma separated, no header, every value
// printed with 17 significant digits so that a write/read cycle is exact.

DenseMatrix read_matrix_csv(const std::filesystem::path& path);
DenseMatrix parse_matrix_csv(std::string_view text, const std::string& origin = "<memory>");
std::string format_matrix_csv(const DenseMatrix& m);
void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m);

/// Reads a vector stored either as a single column or a single row.
Vector read_vector_csv(const std::filesystem::path& path);

/// Shortest-round-trip-safe decimal rendering used by every CSV writer.
std::string format_real(double v);

/// Writes `contents` to a sibling temporary file and renames it over `path`,
/// so a failed write never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace csadapt
