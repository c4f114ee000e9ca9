#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mates/sample.hpp"

namespace mates::cli {

struct CsvTable {
  std::string source;               ///< file name for messages
  std::vector<std::string> header;  ///< empty when the file has none
  std::vector<std::vector<std::string>> rows;
  std::size_t first_line = 1;       ///< 1-based record number of rows[0]
};

/// RFC 4180 records: comma separated, optional double quotes with "" escapes,
/// CRLF or LF line ends. The first record is a header when any of its cells
/// is not a number.
CsvTable parse_csv(std::string_view text, std::string source);
CsvTable read_csv(const std::filesystem::path& path);

bool parse_number(std::string_view cell, double& value);

/// All cells as doubles; throws DataError naming the record and column of
/// the first bad cell, or a ragged row.
RowMatrix numeric_matrix(const CsvTable& table);

std::string quote(std::string_view cell);
/// Shortest representation that reads back to the same double.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace mates::cli
