#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mates/pipeline.hpp"
#include "mates/sample.hpp"

namespace mates {

enum class Family { null_a, null_b, null_c, null_d, null_e, alt_I, alt_II, alt_III, alt_IV, alt_V };
/// Alternatives only: full, partial (first ceil(d/3) coordinates differ),
/// correlated (Y = Sigma^{1/2} Y'), directional (per-coordinate parameters).
enum class Pattern { none, full, partial, correlated, directional };

std::string_view to_string(Family family) noexcept;
std::string_view to_string(Pattern pattern) noexcept;
/// "null-a".."null-e", "alt-I".."alt-V" (case-insensitive).
Family parse_family(std::string_view text);
/// "i".."iv", or full/partial/correlated/directional; "" or "none" for nulls.
Pattern parse_pattern(std::string_view text);
bool is_null(Family family) noexcept;

struct ScenarioSpec {
  Family family = Family::null_a;
  Pattern pattern = Pattern::none;
  Index d = 200;
  Index m = 50;
  Index n = 50;
  std::map<std::string, double> params;
  std::optional<double> reported_rate;  ///< published rejection rate, when known

  /// e.g. "null-a" or "alt-I(ii)".
  std::string id() const;
};

/// Parameter names a scenario accepts.
std::vector<std::string> param_names(Family family, Pattern pattern);

/// Default parameters. Null settings accept any d; alternatives have defaults
/// for d in {200, 500, 1000} only, otherwise every parameter must be given in
/// `overrides`.
ScenarioSpec make_scenario(Family family, Pattern pattern, Index d, Index m = 50, Index n = 50,
                           const std::map<std::string, double>& overrides = {});

/// Sets one parameter after checking its name and range.
void set_param(ScenarioSpec& spec, const std::string& name, double value);
/// Checks completeness and ranges of all parameters.
void validate(const ScenarioSpec& spec);

/// Every published cell: 5 null settings and 5 x 4 alternatives, each at
/// d = 200, 500, 1000 with m = n = 50.
std::vector<ScenarioSpec> default_catalog();

std::string catalog_to_json(const std::vector<ScenarioSpec>& catalog);
std::vector<ScenarioSpec> catalog_from_json(const std::string& text);

/// Draws one data set. Random numbers are consumed in a fixed order:
/// per-coordinate parameters, then the X rows, then the Y rows.
SampleMatrix generate(const ScenarioSpec& spec, std::uint64_t seed, std::uint64_t replication = 0);

struct ExperimentConfig {
  std::size_t replications = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::vector<ViewSpec> views = default_views();
  /// Called with the number of finished replications (from worker threads).
  std::function<void(std::size_t)> progress;
};

struct ReplicationRecord {
  double t_s = 0.0;
  double p_value = 1.0;
  bool failed = false;
  std::string error;
};

struct ExperimentResult {
  ScenarioSpec scenario;
  std::size_t replications = 0;
  double alpha = 0.05;
  std::size_t rejections = 0;
  std::size_t failures = 0;
  /// rejections / (replications - failures)
  double rejection_rate = 0.0;
  std::vector<ReplicationRecord> records;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

/// Runs the test on `replications` generated data sets. Replications whose
/// covariance is singular are excluded and counted; more than 0.1% of them
/// raises Degenerate.
ExperimentResult run_experiment(const ScenarioSpec& spec, const ExperimentConfig& config);

}  // namespace mates
