#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace rande {

// Shortest decimal form that round-trips a double exactly ("%.17g" fallback
// widths chosen by the printer).
std::string format_double(double v);

// Writes text to path atomically (temp file + rename).
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

std::string read_text(const std::filesystem::path& path);

// Matrix CSV: one row per line, comma-separated, full round-trip precision.
void write_matrix_csv(const std::filesystem::path& path,
                      const std::vector<double>& values, std::size_t n_rows,
                      std::size_t n_cols);
std::vector<double> read_matrix_csv(const std::filesystem::path& path,
                                    std::size_t expected_rows,
                                    std::size_t expected_cols);

// FNV-1a 64 hash of the file's bytes, as 16 hex digits.
std::string hash_file(const std::filesystem::path& path);
std::string hash_bytes(const std::string& bytes);

}  // namespace rande
