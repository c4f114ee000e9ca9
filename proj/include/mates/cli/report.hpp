#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mates/inference.hpp"

namespace mates::cli {

struct ViewMeta {
  std::string config;  ///< e.g. "moment:2", "lp:1", "precomputed:d.csv"
  std::string graph;
  int k = 0;
  std::string weights;
  std::optional<double> bandwidth;  ///< kernel weights only
};

struct ReportMeta {
  std::string x_file, y_file, pooled_file, labels;
  Index m = 0, n = 0, d = 0;
  std::vector<ViewMeta> views;
  std::string method;
  std::uint64_t seed = 0;
  std::string simd;
};

struct TestReport {
  ReportMeta meta;
  MatesResult result;
};

/// Independence ranks and implicated views are written; the centred
/// matrices are not, and read back empty.
std::string to_json(const TestReport& report);
TestReport report_from_json(const std::string& text);

/// Long format: key,view,value.
std::string to_csv(const TestReport& report);

}  // namespace mates::cli
