#include "mates/cli/csv.hpp"

#include <cerrno>
#include <cstring>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "mates/error.hpp"

namespace mates::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

bool parse_number(std::string_view cell, double& value) {
  cell = trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

CsvTable parse_csv(std::string_view text, std::string source) {
  CsvTable table;
  table.source = std::move(source);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool quoted = false;
  bool cell_started = false;
  std::size_t line = 1;
  auto end_cell = [&] {
    record.push_back(std::move(cell));
    cell.clear();
    cell_started = false;
  };
  auto end_record = [&] {
    end_cell();
    // A blank line carries no record.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    if (c == '"' && !cell_started) {
      quoted = true;
      cell_started = true;
    } else if (c == ',') {
      end_cell();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      end_record();
      ++line;
    } else {
      cell += c;
      cell_started = true;
    }
  }
  if (quoted) throw DataError(table.source + ": unterminated quoted field near line " + std::to_string(line));
  if (cell_started || !cell.empty() || !record.empty()) end_record();

  if (records.empty()) throw DataError(table.source + ": no data");
  bool header = false;
  double tmp;
  for (const auto& c : records.front()) {
    if (!parse_number(c, tmp)) header = true;
  }
  std::size_t start = 0;
  if (header) {
    table.header = records.front();
    start = 1;
    table.first_line = 2;
  }
  table.rows.assign(std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>(start)),
                    std::make_move_iterator(records.end()));
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path), path.string()); }

RowMatrix numeric_matrix(const CsvTable& table) {
  if (table.rows.empty()) throw DataError(table.source + ": no data rows");
  const std::size_t cols = table.header.empty() ? table.rows.front().size() : table.header.size();
  RowMatrix out(static_cast<Index>(table.rows.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t record = table.first_line + r;
    if (row.size() != cols) {
      throw DataError(table.source + ": row " + std::to_string(record) + " has " + std::to_string(row.size()) +
                      " columns, expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double v;
      if (!parse_number(row[c], v) || !std::isfinite(v)) {
        std::string col = std::to_string(c + 1);
        if (!table.header.empty()) col += " (" + table.header[c] + ")";
        throw DataError(table.source + ": non-numeric cell '" + row[c] + "' at row " + std::to_string(record) +
                        ", column " + col);
      }
      out(static_cast<Index>(r), static_cast<Index>(c)) = v;
    }
  }
  return out;
}

std::string quote(std::string_view cell) {
  if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string() + ": " + std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string() + ": " + std::strerror(errno));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw DataError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

}  // namespace mates::cli
