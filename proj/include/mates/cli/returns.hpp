#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "mates/cli/csv.hpp"

namespace mates::cli {

struct Date {
  int year = 0, month = 0, day = 0;
  auto operator<=>(const Date&) const = default;
  std::string str() const;  ///< YYYY-MM-DD
};

/// YYYY-MM-DD, YYYY/MM/DD or YYYYMMDD; checks the calendar.
Date parse_date(std::string_view text);

struct PricePanel {
  std::vector<std::string> assets;
  std::vector<Date> dates;  ///< strictly increasing
  RowMatrix prices;         ///< NaN marks a missing price
};

/// `date_column` names a header cell; empty selects the first column.
/// Empty, "NA" and "NaN" cells are missing.
PricePanel parse_prices(const CsvTable& table, const std::string& date_column = {});

struct ReturnsOptions {
  Date split;
  /// Assets whose fraction of missing prices exceeds this are dropped.
  double drop_missing_threshold = 0.0;
  bool log_returns = false;
};

struct ReturnsSplit {
  std::vector<std::string> assets;
  std::vector<std::string> dropped;
  std::vector<Date> before_dates, after_dates;
  RowMatrix before, after;
};

/// Day-t return uses the prices of rows t-1 and t and is dated t; days on or
/// after the split date form the "after" block. Days where a kept asset lacks
/// either price are skipped.
ReturnsSplit compute_returns(const PricePanel& panel, const ReturnsOptions& options);

/// Header of asset names, one row per day.
std::string returns_csv(const std::vector<std::string>& assets, const RowMatrix& block);

}  // namespace mates::cli
