#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace alc::io {

/// Formats a double with 17 significant digits ("%.17g" style) using
/// std::to_chars, so output is locale-independent and round-trips exactly.
std::string format_double(double value);

/// Locale-independent parse; throws std::invalid_argument on garbage.
double parse_double(std::string_view text);

/// Splits one CSV line on commas. No quoting (none of our fields need it).
std::vector<std::string> split_csv_line(std::string_view line);

/// Reads a whole text file; throws std::runtime_error if unreadable.
std::string read_file(const std::filesystem::path& path);

/// Reads a CSV file, checks the exact header, returns the data rows split
/// into fields. Blank trailing lines are ignored.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               std::string_view expected_header);

/// Writes content to a temporary file in the same directory and renames it
/// over the target, so readers never observe a half-written file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace alc::io
