#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cdscan {

/// Writes `content` to a temporary sibling and renames it over `path`.
/// Throws DataError on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Fixed-point formatting, e.g. format_fixed(1.18637, 3) == "1.186".
/// NaN formats as "nan".
std::string format_fixed(double x, int decimals);

/// Shortest round-trippable decimal form.
std::string format_exact(double x);

std::vector<std::string> split(std::string_view s, char delim);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Reads one number per line (blank lines and '#' comments skipped). A
/// tab-separated line uses its last field.
std::vector<double> read_numbers(const std::filesystem::path& path);

}  // namespace cdscan
