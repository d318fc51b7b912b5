#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace frugal {

std::string read_text_file(const std::filesystem::path& path);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a partially written file.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

// RFC 4180 CSV. Quoted fields may contain commas, doubled quotes and newlines.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;  // 1-based line where each record starts
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

std::string csv_field(std::string_view value);  // quotes when needed
std::string csv_row(const std::vector<std::string>& fields);

std::string format_double(double v, int precision);

}  // namespace frugal
