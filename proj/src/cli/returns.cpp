#include "mates/cli/returns.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "mates/error.hpp"

namespace mates::cli {
namespace {

bool read_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

int days_in_month(int y, int m) {
  static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return m == 2 && leap ? 29 : days[m - 1];
}

bool is_missing(std::string_view cell) {
  std::string t(cell);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
  return t.empty() || t == "na" || t == "nan";
}

}  // namespace

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date parse_date(std::string_view text) {
  Date d;
  bool ok = false;
  if (text.size() == 10 && (text[4] == '-' || text[4] == '/') && text[7] == text[4]) {
    ok = read_int(text.substr(0, 4), d.year) && read_int(text.substr(5, 2), d.month) &&
         read_int(text.substr(8, 2), d.day);
  } else if (text.size() == 8) {
    ok = read_int(text.substr(0, 4), d.year) && read_int(text.substr(4, 2), d.month) &&
         read_int(text.substr(6, 2), d.day);
  }
  if (!ok || d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) {
    throw DataError("unparseable date '" + std::string(text) + "'");
  }
  return d;
}

PricePanel parse_prices(const CsvTable& table, const std::string& date_column) {
  if (table.header.empty()) throw DataError(table.source + ": price file needs a header row");
  std::size_t date_col = 0;
  if (!date_column.empty()) {
    auto it = std::find(table.header.begin(), table.header.end(), date_column);
    if (it == table.header.end()) throw DataError(table.source + ": no column named '" + date_column + "'");
    date_col = static_cast<std::size_t>(it - table.header.begin());
  }
  const std::size_t cols = table.header.size();
  if (cols < 2) throw DataError(table.source + ": no asset columns");

  struct Row {
    Date date;
    std::size_t index;
  };
  std::vector<Row> order;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto record = std::to_string(table.first_line + r);
    if (row.size() != cols) throw DataError(table.source + ": row " + record + " has the wrong number of columns");
    try {
      order.push_back({parse_date(row[date_col]), r});
    } catch (const DataError& e) {
      throw DataError(table.source + ": row " + record + ": " + e.what());
    }
  }
  std::stable_sort(order.begin(), order.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i].date == order[i - 1].date) {
      throw DataError(table.source + ": duplicate date " + order[i].date.str());
    }
  }

  PricePanel panel;
  for (std::size_t c = 0; c < cols; ++c) {
    if (c != date_col) panel.assets.push_back(table.header[c]);
  }
  panel.prices.resize(static_cast<Index>(order.size()), static_cast<Index>(cols - 1));
  for (std::size_t i = 0; i < order.size(); ++i) {
    panel.dates.push_back(order[i].date);
    const auto& row = table.rows[order[i].index];
    Index out_col = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (c == date_col) continue;
      double v = std::numeric_limits<double>::quiet_NaN();
      if (!is_missing(row[c])) {
        if (!parse_number(row[c], v) || !std::isfinite(v) || v <= 0.0) {
          throw DataError(table.source + ": price '" + row[c] + "' at row " +
                          std::to_string(table.first_line + order[i].index) + ", column " + std::to_string(c + 1) +
                          " (" + table.header[c] + ") is not a positive number");
        }
      }
      panel.prices(static_cast<Index>(i), out_col++) = v;
    }
  }
  return panel;
}

ReturnsSplit compute_returns(const PricePanel& panel, const ReturnsOptions& options) {
  const Index t = panel.prices.rows();
  const Index a = panel.prices.cols();
  ReturnsSplit out;
  std::vector<Index> kept;
  for (Index j = 0; j < a; ++j) {
    const auto missing = panel.prices.col(j).array().isNaN().count();
    const double frac = t ? static_cast<double>(missing) / static_cast<double>(t) : 0.0;
    if (frac > options.drop_missing_threshold) {
      out.dropped.push_back(panel.assets[static_cast<std::size_t>(j)]);
    } else {
      kept.push_back(j);
      out.assets.push_back(panel.assets[static_cast<std::size_t>(j)]);
    }
  }
  if (kept.empty()) throw DataError("every asset exceeds the missing-data threshold");

  std::vector<std::vector<double>> before, after;
  for (Index i = 1; i < t; ++i) {
    std::vector<double> r;
    r.reserve(kept.size());
    bool complete = true;
    for (Index j : kept) {
      const double p0 = panel.prices(i - 1, j), p1 = panel.prices(i, j);
      if (std::isnan(p0) || std::isnan(p1)) {
        complete = false;
        break;
      }
      r.push_back(options.log_returns ? std::log(p1 / p0) : p1 / p0 - 1.0);
    }
    if (!complete) continue;
    const Date& day = panel.dates[static_cast<std::size_t>(i)];
    if (day < options.split) {
      before.push_back(std::move(r));
      out.before_dates.push_back(day);
    } else {
      after.push_back(std::move(r));
      out.after_dates.push_back(day);
    }
  }
  if (before.size() < 3 || after.size() < 3) {
    throw DataError("need at least 3 return days on each side of " + options.split.str() + " (have " +
                    std::to_string(before.size()) + " before, " + std::to_string(after.size()) + " after)");
  }
  auto fill = [&](const std::vector<std::vector<double>>& rows) {
    RowMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(kept.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < kept.size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    return m;
  };
  out.before = fill(before);
  out.after = fill(after);
  return out;
}

std::string returns_csv(const std::vector<std::string>& assets, const RowMatrix& block) {
  std::string out;
  for (std::size_t j = 0; j < assets.size(); ++j) out += (j ? "," : "") + quote(assets[j]);
  out += "\n";
  for (Index i = 0; i < block.rows(); ++i) {
    for (Index j = 0; j < block.cols(); ++j) out += (j ? "," : "") + format_double(block(i, j));
    out += "\n";
  }
  return out;
}

}  // namespace mates::cli
