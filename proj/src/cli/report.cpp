#include "mates/cli/report.hpp"

#include "json.hpp"
#include "mates/cli/csv.hpp"
#include "mates/error.hpp"

namespace mates::cli {
namespace {

using json = nlohmann::ordered_json;

const char* kDegenerate = "degenerate";

json opt(const std::optional<double>& v) { return v ? json(*v) : json(kDegenerate); }

std::optional<double> read_opt(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != kDegenerate) throw DataError("unexpected string '" + j.get<std::string>() + "'");
    return std::nullopt;
  }
  return j.get<double>();
}

json conditions_json(const ConditionReport& r) {
  json views = json::array();
  for (std::size_t s = 0; s < r.views.size(); ++s) {
    const auto& v = r.views[s];
    views.push_back({{"s", s + 1},
                     {"cond1", opt(v.cond1)},
                     {"cond2", opt(v.cond2)},
                     {"cond3", opt(v.cond3)},
                     {"cond1_prime", opt(v.cond1_prime)},
                     {"gamma_hat", opt(v.gamma_hat)},
                     {"max_degree", v.max_degree},
                     {"k", v.k},
                     {"degree_ratio", v.degree_ratio},
                     {"b0", v.b0}});
  }
  return {{"views", views},
          {"cond4", opt(r.cond4)},
          {"cond5", opt(r.cond5)},
          {"n_squares", r.n_squares},
          {"beta_hat", r.beta_hat},
          {"n_squares_ratio", r.n_squares_ratio},
          // Only the order of b0 is known; the constant 1 is our choice.
          {"b0_convention", "1/sqrt(W2), order-level choice"}};
}

ConditionReport conditions_from(const json& j) {
  ConditionReport r;
  for (const auto& v : j.at("views")) {
    ViewConditions c;
    c.cond1 = read_opt(v.at("cond1"));
    c.cond2 = read_opt(v.at("cond2"));
    c.cond3 = read_opt(v.at("cond3"));
    c.cond1_prime = read_opt(v.at("cond1_prime"));
    c.gamma_hat = read_opt(v.at("gamma_hat"));
    c.max_degree = v.at("max_degree").get<Index>();
    c.k = v.at("k").get<int>();
    c.degree_ratio = v.at("degree_ratio").get<double>();
    c.b0 = v.at("b0").get<double>();
    r.views.push_back(c);
  }
  r.cond4 = read_opt(j.at("cond4"));
  r.cond5 = read_opt(j.at("cond5"));
  r.n_squares = j.at("n_squares").get<std::uint64_t>();
  r.beta_hat = j.at("beta_hat").get<double>();
  r.n_squares_ratio = j.at("n_squares_ratio").get<double>();
  return r;
}

}  // namespace

std::string to_json(const TestReport& report) {
  const auto& meta = report.meta;
  const auto& res = report.result;
  json j;
  json views_meta = json::array();
  for (const auto& v : meta.views) {
    json e = {{"config", v.config}, {"graph", v.graph}, {"k", v.k}, {"weights", v.weights}};
    e["bandwidth"] = v.bandwidth ? json(*v.bandwidth) : json(nullptr);
    views_meta.push_back(e);
  }
  j["meta"] = {{"x_file", meta.x_file},
               {"y_file", meta.y_file},
               {"pooled_file", meta.pooled_file},
               {"labels", meta.labels},
               {"m", meta.m},
               {"n", meta.n},
               {"d", meta.d},
               {"views", views_meta},
               {"method", meta.method},
               {"seed", meta.seed},
               {"simd", meta.simd}};
  j["views"] = json::array();
  for (const auto& v : res.views) {
    j["views"].push_back({{"s", v.view},
                          {"U_x", v.u_x},
                          {"U_y", v.u_y},
                          {"U_w", v.u_w},
                          {"U_diff", v.u_diff},
                          {"mean_U_x", v.mean_u_x},
                          {"mean_U_y", v.mean_u_y},
                          {"mean_U_w", v.mean_u_w},
                          {"mean_U_diff", v.mean_u_diff},
                          {"T_prime", v.t_prime},
                          {"p_prime", v.p_prime}});
  }
  j["T_S"] = res.t_s;
  j["dof"] = res.dof;
  j["p_asymptotic"] = res.p_asymptotic;
  if (res.p_permutation) j["p_permutation"] = *res.p_permutation;
  if (res.n_permutations) j["n_permutations"] = *res.n_permutations;
  const auto& ind = res.independence;
  j["independence"] = {{"views", ind.views},
                       {"rank_w", ind.rank_w},
                       {"rank_diff", ind.rank_diff},
                       {"singular_views_w", ind.singular_views_w},
                       {"singular_views_diff", ind.singular_views_diff}};
  j["diagnostics"] = res.diagnostics ? conditions_json(*res.diagnostics) : json(nullptr);
  return j.dump(2) + "\n";
}

TestReport report_from_json(const std::string& text) {
  TestReport report;
  try {
    const json j = json::parse(text);
    auto& meta = report.meta;
    const auto& jm = j.at("meta");
    meta.x_file = jm.at("x_file").get<std::string>();
    meta.y_file = jm.at("y_file").get<std::string>();
    meta.pooled_file = jm.at("pooled_file").get<std::string>();
    meta.labels = jm.at("labels").get<std::string>();
    meta.m = jm.at("m").get<Index>();
    meta.n = jm.at("n").get<Index>();
    meta.d = jm.at("d").get<Index>();
    for (const auto& v : jm.at("views")) {
      ViewMeta vm;
      vm.config = v.at("config").get<std::string>();
      vm.graph = v.at("graph").get<std::string>();
      vm.k = v.at("k").get<int>();
      vm.weights = v.at("weights").get<std::string>();
      if (!v.at("bandwidth").is_null()) vm.bandwidth = v.at("bandwidth").get<double>();
      meta.views.push_back(vm);
    }
    meta.method = jm.at("method").get<std::string>();
    meta.seed = jm.at("seed").get<std::uint64_t>();
    meta.simd = jm.at("simd").get<std::string>();

    auto& res = report.result;
    for (const auto& v : j.at("views")) {
      ViewResult r;
      r.view = v.at("s").get<int>();
      r.u_x = v.at("U_x").get<double>();
      r.u_y = v.at("U_y").get<double>();
      r.u_w = v.at("U_w").get<double>();
      r.u_diff = v.at("U_diff").get<double>();
      r.mean_u_x = v.at("mean_U_x").get<double>();
      r.mean_u_y = v.at("mean_U_y").get<double>();
      r.mean_u_w = v.at("mean_U_w").get<double>();
      r.mean_u_diff = v.at("mean_U_diff").get<double>();
      r.t_prime = v.at("T_prime").get<double>();
      r.p_prime = v.at("p_prime").get<double>();
      res.views.push_back(r);
    }
    res.t_s = j.at("T_S").get<double>();
    res.dof = j.at("dof").get<int>();
    res.p_asymptotic = j.at("p_asymptotic").get<double>();
    if (j.contains("p_permutation")) res.p_permutation = j["p_permutation"].get<double>();
    if (j.contains("n_permutations")) res.n_permutations = j["n_permutations"].get<std::size_t>();
    const auto& ind = j.at("independence");
    res.independence.views = ind.at("views").get<int>();
    res.independence.rank_w = ind.at("rank_w").get<int>();
    res.independence.rank_diff = ind.at("rank_diff").get<int>();
    res.independence.singular_views_w = ind.at("singular_views_w").get<std::vector<int>>();
    res.independence.singular_views_diff = ind.at("singular_views_diff").get<std::vector<int>>();
    if (!j.at("diagnostics").is_null()) res.diagnostics = conditions_from(j["diagnostics"]);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
  return report;
}

std::string to_csv(const TestReport& report) {
  const auto& res = report.result;
  std::string out = "key,view,value\n";
  auto row = [&](const std::string& key, const std::string& view, const std::string& value) {
    out += quote(key) + "," + view + "," + quote(value) + "\n";
  };
  row("T_S", "", format_double(res.t_s));
  row("dof", "", std::to_string(res.dof));
  row("p_asymptotic", "", format_double(res.p_asymptotic));
  if (res.p_permutation) row("p_permutation", "", format_double(*res.p_permutation));
  if (res.n_permutations) row("n_permutations", "", std::to_string(*res.n_permutations));
  for (const auto& v : res.views) {
    const auto s = std::to_string(v.view);
    row("U_x", s, format_double(v.u_x));
    row("U_y", s, format_double(v.u_y));
    row("U_w", s, format_double(v.u_w));
    row("U_diff", s, format_double(v.u_diff));
    row("T_prime", s, format_double(v.t_prime));
    row("p_prime", s, format_double(v.p_prime));
  }
  row("rank_w", "", std::to_string(res.independence.rank_w));
  row("rank_diff", "", std::to_string(res.independence.rank_diff));
  return out;
}

}  // namespace mates::cli
