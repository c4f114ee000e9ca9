#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include "json.hpp"

#include "mates/error.hpp"
#include "mates/simbench.hpp"

namespace mates {
namespace {

constexpr std::array<Index, 3> kDims = {200, 500, 1000};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

int dim_slot(Index d) {
  for (std::size_t i = 0; i < kDims.size(); ++i) {
    if (kDims[i] == d) return static_cast<int>(i);
  }
  return -1;
}

using Triple = std::array<double, 3>;

struct AltDefaults {
  const char* name;  // main parameter (or range prefix for directional)
  Triple full, partial, correlated;
  double rho;
  Triple dir_low, dir_high;
};

// Indexed by family - alt_I.
const std::array<AltDefaults, 5> kAlt = {{
    {"df", {15, 25, 35}, {5, 7.5, 10}, {15, 25, 35}, 0.1, {5, 8, 15}, {40, 60, 80}},
    {"mu", {0.78, 0.65, 0.6}, {1.15, 0.95, 0.85}, {0.8, 0.66, 0.6}, 0.1, {0, 0, 0}, {1.18, 1.0, 0.9}},
    {"beta", {2.4, 2.2, 2.15}, {3.2, 2.7, 2.5}, {2.4, 2.2, 2.15}, 0.1, {2, 2, 2}, {2.9, 2.5, 2.3}},
    {"sigma", {0.24, 0.19, 0.14}, {0.5, 0.42, 0.3}, {0.3, 0.23, 0.19}, 0.005, {0.01, 0.01, 0.01}, {0.45, 0.32, 0.22}},
    {"y_df", {6.8, 6.2, 5.8}, {100, 13, 9}, {6.8, 6.1, 5.8}, 0.1, {5, 5, 5}, {9, 7.4, 6.7}},
}};

// Published rejection rates (percent) at m = n = 50.
const std::array<Triple, 5> kNullRates = {{{5.3, 5.3, 5.0}, {5.5, 4.5, 6.5}, {5.2, 5.9, 5.1}, {6.0, 5.2, 6.6}, {5.7, 4.5, 4.9}}};
// [family][pattern]
const std::array<std::array<Triple, 4>, 5> kAltRates = {{
    {{{90.9, 85.2, 85.8}, {80.3, 78.4, 84.4}, {90.8, 86.0, 85.8}, {87.9, 85.5, 80.9}}},
    {{{81.2, 71.3, 82.4}, {83.7, 79.0, 82.2}, {90.0, 75.1, 81.6}, {84.3, 79.0, 81.8}}},
    {{{89.5, 82.5, 82.7}, {83.3, 82.2, 89.8}, {91.6, 74.2, 81.5}, {87.8, 85.4, 76.5}}},
    {{{74.3, 89.9, 84.7}, {61.3, 81.3, 72.3}, {90.6, 88.1, 82.2}, {82.5, 82.5, 70.4}}},
    {{{77.9, 88.3, 87.8}, {78.9, 80.7, 82.3}, {80.5, 87.6, 90.5}, {76.9, 82.2, 86.6}}},
}};

int alt_slot(Family f) { return static_cast<int>(f) - static_cast<int>(Family::alt_I); }
int pattern_slot(Pattern p) { return static_cast<int>(p) - static_cast<int>(Pattern::full); }

std::string main_param(Family f) { return kAlt[alt_slot(f)].name; }

std::map<std::string, double> null_defaults(Family f) {
  switch (f) {
    case Family::null_a: return {};
    case Family::null_b: return {{"shift", 0.5}};
    case Family::null_c: return {{"alpha", 1.0}, {"beta", 3.0}};
    case Family::null_d: return {{"df", 15.0}};
    case Family::null_e: return {{"shape", 2.0}, {"rate", 2.0}};
    default: return {};
  }
}

// Parameters fixed across d for an alternative.
std::map<std::string, double> alt_constants(Family f, Pattern p) {
  std::map<std::string, double> out;
  if (f == Family::alt_III) out["alpha"] = 1.0;
  if (f == Family::alt_V) out["x_df"] = 5.0;
  if (p == Pattern::correlated) out["rho"] = kAlt[alt_slot(f)].rho;
  return out;
}

std::map<std::string, double> alt_defaults(Family f, Pattern p, int slot) {
  auto out = alt_constants(f, p);
  const auto& t = kAlt[alt_slot(f)];
  switch (p) {
    case Pattern::full: out[t.name] = t.full[slot]; break;
    case Pattern::partial: out[t.name] = t.partial[slot]; break;
    case Pattern::correlated: out[t.name] = t.correlated[slot]; break;
    case Pattern::directional:
      out[std::string(t.name) + "_low"] = t.dir_low[slot];
      out[std::string(t.name) + "_high"] = t.dir_high[slot];
      break;
    case Pattern::none: break;
  }
  return out;
}

void check_param(Family f, const std::string& name, double value, const std::string& id) {
  auto fail = [&](const char* why) {
    throw InvalidArgument("parameter '" + name + "' of " + id + " " + why);
  };
  if (!std::isfinite(value)) fail("must be finite");
  if (name == "rho") {
    if (!(value > -1.0 && value < 1.0)) fail("must lie in (-1, 1)");
    return;
  }
  const bool is_df = name.rfind("df", 0) == 0 || name.rfind("y_df", 0) == 0 || name == "x_df";
  if (is_df) {
    // alt-I needs the variance of X for the matched normal, alt-V standardizes
    const bool needs_variance = f == Family::alt_I || f == Family::alt_V;
    if (needs_variance ? !(value > 2.0) : !(value > 0.0)) fail(needs_variance ? "must exceed 2" : "must be positive");
    return;
  }
  if (name == "mu" || name == "mu_low" || name == "mu_high" || name == "shift") {
    if (!(value >= 0.0)) fail("must be nonnegative");
    return;
  }
  if (!(value > 0.0)) fail("must be positive");
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::null_a: return "null-a";
    case Family::null_b: return "null-b";
    case Family::null_c: return "null-c";
    case Family::null_d: return "null-d";
    case Family::null_e: return "null-e";
    case Family::alt_I: return "alt-I";
    case Family::alt_II: return "alt-II";
    case Family::alt_III: return "alt-III";
    case Family::alt_IV: return "alt-IV";
    case Family::alt_V: return "alt-V";
  }
  return "?";
}

std::string_view to_string(Pattern pattern) noexcept {
  switch (pattern) {
    case Pattern::none: return "";
    case Pattern::full: return "i";
    case Pattern::partial: return "ii";
    case Pattern::correlated: return "iii";
    case Pattern::directional: return "iv";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  const auto t = lower(text);
  for (int f = 0; f <= static_cast<int>(Family::alt_V); ++f) {
    if (lower(to_string(static_cast<Family>(f))) == t) return static_cast<Family>(f);
  }
  throw InvalidArgument("unknown scenario '" + std::string(text) + "'");
}

Pattern parse_pattern(std::string_view text) {
  const auto t = lower(text);
  if (t.empty() || t == "none") return Pattern::none;
  if (t == "i" || t == "1" || t == "full") return Pattern::full;
  if (t == "ii" || t == "2" || t == "partial") return Pattern::partial;
  if (t == "iii" || t == "3" || t == "correlated") return Pattern::correlated;
  if (t == "iv" || t == "4" || t == "directional") return Pattern::directional;
  throw InvalidArgument("unknown pattern '" + std::string(text) + "'");
}

bool is_null(Family family) noexcept { return static_cast<int>(family) < static_cast<int>(Family::alt_I); }

std::string ScenarioSpec::id() const {
  std::string out(to_string(family));
  if (pattern != Pattern::none) out += "(" + std::string(to_string(pattern)) + ")";
  return out;
}

std::vector<std::string> param_names(Family family, Pattern pattern) {
  std::vector<std::string> names;
  if (is_null(family)) {
    for (const auto& [k, v] : null_defaults(family)) names.push_back(k);
    return names;
  }
  for (const auto& [k, v] : alt_defaults(family, pattern, 0)) names.push_back(k);
  return names;
}

void set_param(ScenarioSpec& spec, const std::string& name, double value) {
  const auto names = param_names(spec.family, spec.pattern);
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw InvalidArgument("scenario " + spec.id() + " has no parameter '" + name + "' (accepted: " +
                          (list.empty() ? "none" : list) + ")");
  }
  check_param(spec.family, name, value, spec.id());
  // An edited cell no longer matches the published one.
  if (spec.params.count(name) == 0 || spec.params[name] != value) spec.reported_rate.reset();
  spec.params[name] = value;
}

void validate(const ScenarioSpec& spec) {
  if (is_null(spec.family) != (spec.pattern == Pattern::none)) {
    throw InvalidArgument(is_null(spec.family) ? "null scenarios take no pattern"
                                               : "alternative scenarios need a pattern (i..iv)");
  }
  if (spec.m < 2 || spec.n < 2) throw InvalidArgument("m and n must be at least 2");
  if (spec.d < 1) throw InvalidArgument("d must be at least 1");
  for (const auto& name : param_names(spec.family, spec.pattern)) {
    auto it = spec.params.find(name);
    if (it == spec.params.end()) throw InvalidArgument("scenario " + spec.id() + " is missing parameter '" + name + "'");
    check_param(spec.family, name, it->second, spec.id());
  }
  for (const auto& [name, value] : spec.params) {
    const auto names = param_names(spec.family, spec.pattern);
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw InvalidArgument("scenario " + spec.id() + " has no parameter '" + name + "'");
    }
  }
  if (spec.pattern == Pattern::directional) {
    const auto base = main_param(spec.family);
    if (!(spec.params.at(base + "_low") < spec.params.at(base + "_high"))) {
      throw InvalidArgument("scenario " + spec.id() + ": " + base + "_low must be below " + base + "_high");
    }
  }
}

ScenarioSpec make_scenario(Family family, Pattern pattern, Index d, Index m, Index n,
                           const std::map<std::string, double>& overrides) {
  ScenarioSpec spec;
  spec.family = family;
  spec.pattern = pattern;
  spec.d = d;
  spec.m = m;
  spec.n = n;
  if (is_null(family) != (pattern == Pattern::none)) validate(spec);  // throws the pattern message
  const int slot = dim_slot(d);
  if (is_null(family)) {
    spec.params = null_defaults(family);
  } else if (slot >= 0) {
    spec.params = alt_defaults(family, pattern, slot);
  } else {
    spec.params = alt_constants(family, pattern);
  }
  for (const auto& [k, v] : overrides) set_param(spec, k, v);
  if (slot >= 0 && m == 50 && n == 50 && overrides.empty()) {
    const double pct = is_null(family) ? kNullRates[static_cast<int>(family)][slot]
                                       : kAltRates[alt_slot(family)][pattern_slot(pattern)][slot];
    spec.reported_rate = pct / 100.0;
  }
  if (!is_null(family) && slot < 0) {
    for (const auto& name : param_names(family, pattern)) {
      if (!spec.params.count(name)) {
        throw InvalidArgument("no default parameters for " + spec.id() + " at d = " + std::to_string(d) +
                              "; supply '" + name + "'");
      }
    }
  }
  validate(spec);
  return spec;
}

std::vector<ScenarioSpec> default_catalog() {
  std::vector<ScenarioSpec> out;
  for (int f = 0; f <= static_cast<int>(Family::null_e); ++f) {
    for (Index d : kDims) out.push_back(make_scenario(static_cast<Family>(f), Pattern::none, d));
  }
  for (int f = static_cast<int>(Family::alt_I); f <= static_cast<int>(Family::alt_V); ++f) {
    for (int p = static_cast<int>(Pattern::full); p <= static_cast<int>(Pattern::directional); ++p) {
      for (Index d : kDims) out.push_back(make_scenario(static_cast<Family>(f), static_cast<Pattern>(p), d));
    }
  }
  return out;
}

std::string catalog_to_json(const std::vector<ScenarioSpec>& catalog) {
  nlohmann::ordered_json root;
  root["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& s : catalog) {
    nlohmann::ordered_json j;
    j["id"] = s.id();
    j["scenario"] = std::string(to_string(s.family));
    j["pattern"] = std::string(to_string(s.pattern));
    j["d"] = s.d;
    j["m"] = s.m;
    j["n"] = s.n;
    j["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.params) j["params"][k] = v;
    if (s.reported_rate) j["reported_rate"] = *s.reported_rate;
    root["scenarios"].push_back(std::move(j));
  }
  return root.dump(2) + "\n";
}

std::vector<ScenarioSpec> catalog_from_json(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("scenario file is not valid JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("scenarios") || !root["scenarios"].is_array()) {
    throw DataError("scenario file needs a top-level \"scenarios\" array");
  }
  std::vector<ScenarioSpec> out;
  std::size_t index = 0;
  for (const auto& j : root["scenarios"]) {
    const std::string where = "scenario entry " + std::to_string(index++);
    try {
      if (!j.is_object()) throw DataError(where + " is not an object");
      if (!j.contains("scenario")) throw DataError(where + " lacks \"scenario\"");
      const Family family = parse_family(j.at("scenario").get<std::string>());
      const Pattern pattern = parse_pattern(j.value("pattern", std::string()));
      std::map<std::string, double> params;
      if (j.contains("params")) {
        if (!j["params"].is_object()) throw DataError(where + ": \"params\" must be an object");
        for (const auto& [k, v] : j["params"].items()) {
          if (!v.is_number()) throw DataError(where + ": parameter '" + k + "' must be a number");
          params[k] = v.get<double>();
        }
      }
      auto read_size = [&](const char* key, Index fallback) -> Index {
        if (!j.contains(key)) return fallback;
        if (!j[key].is_number_integer()) throw DataError(where + ": \"" + key + "\" must be an integer");
        return j[key].get<Index>();
      };
      const Index d = read_size("d", 200);
      const Index m = read_size("m", 50);
      const Index n = read_size("n", 50);
      // Explicit params replace defaults; keep the published rate if the file has one.
      ScenarioSpec spec = make_scenario(family, pattern, d, m, n, params);
      if (j.contains("reported_rate") && j["reported_rate"].is_number()) {
        spec.reported_rate = j["reported_rate"].get<double>();
      }
      out.push_back(std::move(spec));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace mates
