#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace acts::csv {

struct Row {
    std::size_t line = 0;  // 1-based line number in the source file
    std::vector<std::string> fields;
};

/// Splits CSV text into rows. Handles double-quoted fields with embedded
/// commas and doubled quotes; blank lines are skipped.
std::vector<Row> parse(std::string_view text);

std::vector<Row> read_file(const std::filesystem::path& path);

/// Shortest text that parses back to exactly `value`.
std::string format_double(double value);

/// Parses a finite real; throws FormatError naming `line` on failure.
double parse_double(std::string_view text, std::size_t line);

std::string quote_if_needed(std::string_view field);

std::string read_text(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace acts::csv
