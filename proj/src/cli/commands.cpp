#include "mates/cli/commands.hpp"

#include <atomic>
#include <memory>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "mates/cli/csv.hpp"
#include "mates/cli/report.hpp"
#include "mates/cli/returns.hpp"
#include "mates/error.hpp"
#include "mates/inference.hpp"
#include "mates/parallel.hpp"
#include "mates/pipeline.hpp"
#include "mates/simbench.hpp"
#include "mates/simd/kernels.hpp"

namespace mates::cli {
namespace {

struct DataOptions {
  std::string x, y, pooled, labels;
  std::vector<std::string> views;
  std::string graph = "knn";
  std::string k = "auto";
  std::string weights = "kernel";
  std::string bandwidth = "median";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
  auto* x = cmd->add_option("--x", o.x, "CSV of X observations (rows)");
  auto* y = cmd->add_option("--y", o.y, "CSV of Y observations (rows)");
  auto* pooled = cmd->add_option("--pooled", o.pooled, "CSV of all observations with a label column");
  cmd->add_option("--labels", o.labels, "label column of --pooled: header name or 1-based index");
  x->excludes(pooled);
  y->excludes(pooled);
  cmd->add_option("--views", o.views,
                  "moments:1,2,3,4 | lp:1,2 | precomputed:FILE[,FILE...] (repeatable; default moments:1,2,3,4)");
  cmd->add_option("--graph", o.graph, "knn | kmst")->check(CLI::IsMember({"knn", "kmst"}));
  cmd->add_option("--k", o.k, "graph size, INT or auto");
  cmd->add_option("--weights", o.weights, "binary | similarity | kernel | rank")
      ->check(CLI::IsMember({"binary", "similarity", "kernel", "rank"}));
  cmd->add_option("--bandwidth", o.bandwidth, "kernel bandwidth, REAL or median");
  cmd->add_option("--seed", o.seed, "seed for permutations");
  cmd->add_option("--threads", o.threads, "worker threads (0: MATES_THREADS or all cores)");
  cmd->add_option("--out", o.out, "output file (default stdout)");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double number_arg(const std::string& text, const std::string& what) {
  double v;
  if (!parse_number(text, v)) throw InvalidArgument("invalid " + what + " '" + text + "'");
  return v;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& params) {
  std::map<std::string, double> overrides;
  for (const auto& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--param expects NAME=VALUE, got '" + p + "'");
    overrides[p.substr(0, eq)] = number_arg(p.substr(eq + 1), "value for " + p.substr(0, eq));
  }
  return overrides;
}

GraphSpec graph_spec(const DataOptions& o) {
  GraphSpec g;
  g.kind = parse_graph_kind(o.graph);
  g.weights = parse_weight_scheme(o.weights);
  if (o.k != "auto") {
    const double k = number_arg(o.k, "--k");
    if (k != std::floor(k) || k < 1) throw InvalidArgument("--k must be a positive integer or auto");
    g.k = static_cast<int>(k);
  }
  if (o.bandwidth != "median") {
    const double b = number_arg(o.bandwidth, "--bandwidth");
    if (!(b > 0.0)) throw InvalidArgument("--bandwidth must be positive");
    g.bandwidth = b;
  }
  return g;
}

struct Loaded {
  std::unique_ptr<SampleMatrix> sample;
  std::vector<Index> order;  // input row of each pooled row
};

Loaded load_data(const DataOptions& o) {
  Loaded out;
  if (!o.pooled.empty()) {
    if (o.labels.empty()) throw InvalidArgument("--pooled needs --labels");
    const auto table = read_csv(o.pooled);
    if (table.rows.empty()) throw DataError(o.pooled + ": no data rows");
    const std::size_t cols = table.header.empty() ? table.rows.front().size() : table.header.size();
    std::size_t label_col = cols;
    auto it = std::find(table.header.begin(), table.header.end(), o.labels);
    if (it != table.header.end()) {
      label_col = static_cast<std::size_t>(it - table.header.begin());
    } else {
      double idx;
      if (parse_number(o.labels, idx) && idx >= 1 && idx <= static_cast<double>(cols) && idx == std::floor(idx)) {
        label_col = static_cast<std::size_t>(idx) - 1;
      }
    }
    if (label_col == cols) throw InvalidArgument("no label column '" + o.labels + "' in " + o.pooled);
    CsvTable features;
    features.source = table.source;
    features.first_line = table.first_line;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c != label_col) features.header.push_back(table.header[c]);
    }
    std::vector<Index> xs, ys;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      if (row.size() != cols) {
        throw DataError(o.pooled + ": row " + std::to_string(table.first_line + r) + " has " +
                        std::to_string(row.size()) + " columns, expected " + std::to_string(cols));
      }
      std::string label = row[label_col];
      std::transform(label.begin(), label.end(), label.begin(), [](unsigned char c) { return std::tolower(c); });
      if (label == "x" || label == "0") {
        xs.push_back(static_cast<Index>(r));
      } else if (label == "y" || label == "1") {
        ys.push_back(static_cast<Index>(r));
      } else {
        throw DataError(o.pooled + ": label '" + row[label_col] + "' at row " + std::to_string(table.first_line + r) +
                        " is not x/y or 0/1");
      }
      std::vector<std::string> f;
      for (std::size_t c = 0; c < cols; ++c) {
        if (c != label_col) f.push_back(row[c]);
      }
      features.rows.push_back(std::move(f));
    }
    const RowMatrix all = numeric_matrix(features);
    out.order = xs;
    out.order.insert(out.order.end(), ys.begin(), ys.end());
    RowMatrix z(all.rows(), all.cols());
    for (std::size_t i = 0; i < out.order.size(); ++i) z.row(static_cast<Index>(i)) = all.row(out.order[i]);
    out.sample = std::make_unique<SampleMatrix>(std::move(z), static_cast<Index>(xs.size()),
                                                static_cast<Index>(ys.size()));
    return out;
  }
  if (o.x.empty() || o.y.empty()) throw InvalidArgument("give --x and --y, or --pooled with --labels");
  const RowMatrix x = numeric_matrix(read_csv(o.x));
  const RowMatrix y = numeric_matrix(read_csv(o.y));
  if (x.cols() != y.cols()) {
    throw DataError(o.x + " has " + std::to_string(x.cols()) + " columns but " + o.y + " has " +
                    std::to_string(y.cols()));
  }
  out.sample = std::make_unique<SampleMatrix>(SampleMatrix::from_groups(x, y));
  out.order.resize(static_cast<std::size_t>(x.rows() + y.rows()));
  std::iota(out.order.begin(), out.order.end(), Index{0});
  return out;
}

std::vector<ViewSpec> parse_views(const DataOptions& o, const std::vector<Index>& order) {
  const GraphSpec g = graph_spec(o);
  std::vector<ViewSpec> specs;
  const std::vector<std::string> items = o.views.empty() ? std::vector<std::string>{"moments:1,2,3,4"} : o.views;
  for (const auto& item : items) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidArgument("view '" + item + "' lacks a kind (moments:, lp:, precomputed:)");
    const std::string kind = item.substr(0, colon);
    for (const auto& arg : split(item.substr(colon + 1), ',')) {
      if (arg.empty()) throw InvalidArgument("empty entry in view '" + item + "'");
      ViewSpec v;
      v.graph = g;
      if (kind == "moments" || kind == "moment") {
        v.kind = DissimilarityKind::moment;
        v.order = number_arg(arg, "moment order");
        if (v.order < 1 || v.order != std::floor(v.order)) throw InvalidArgument("moment order must be a positive integer");
      } else if (kind == "lp") {
        v.kind = DissimilarityKind::lp;
        v.order = number_arg(arg, "lp order");
        if (!(v.order > 0)) throw InvalidArgument("lp order must be positive");
      } else if (kind == "precomputed") {
        v.kind = DissimilarityKind::precomputed;
        v.source = arg;
        const RowMatrix raw = numeric_matrix(read_csv(arg));
        const auto n = static_cast<Index>(order.size());
        if (raw.rows() != n || raw.cols() != n) {
          throw DataError(arg + ": expected a " + std::to_string(n) + " x " + std::to_string(n) + " matrix, got " +
                          std::to_string(raw.rows()) + " x " + std::to_string(raw.cols()));
        }
        auto m = std::make_shared<Eigen::MatrixXd>(n, n);
        for (Index i = 0; i < n; ++i) {
          for (Index j = 0; j < n; ++j) (*m)(i, j) = raw(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
        v.matrix = std::move(m);
      } else {
        throw InvalidArgument("unknown view kind '" + kind + "'");
      }
      specs.push_back(std::move(v));
    }
  }
  return specs;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    out.flush();
  } else {
    write_atomic(path, content);
  }
}

PValueMethod parse_method(const std::string& s) {
  if (s == "asymptotic") return PValueMethod::asymptotic;
  if (s == "permutation") return PValueMethod::permutation;
  return PValueMethod::both;
}

void run_test(const DataOptions& o, const std::string& method, std::size_t perms, const std::string& format,
              bool diagnostics, std::ostream& out) {
  const Loaded data = load_data(o);
  const auto specs = parse_views(o, data.order);
  const auto views = build_views(*data.sample, specs);

  AnalyzeOptions opts;
  opts.method = parse_method(method);
  opts.permutations = perms;
  opts.seed = o.seed;
  opts.threads = resolve_threads(o.threads);
  opts.diagnostics = diagnostics;

  TestReport report;
  auto& meta = report.meta;
  meta.x_file = o.x;
  meta.y_file = o.y;
  meta.pooled_file = o.pooled;
  meta.labels = o.labels;
  meta.m = data.sample->m();
  meta.n = data.sample->n();
  meta.d = data.sample->dim();
  for (std::size_t s = 0; s < views.size(); ++s) {
    ViewMeta vm;
    vm.config = specs[s].describe();
    vm.graph = std::string(to_string(views[s].spec.kind));
    vm.k = views[s].spec.k.value_or(0);
    vm.weights = std::string(to_string(views[s].spec.weights));
    if (views[s].spec.weights == WeightScheme::kernel) vm.bandwidth = views[s].spec.bandwidth;
    meta.views.push_back(vm);
  }
  meta.method = method;
  meta.seed = o.seed;
  meta.simd = std::string(simd::to_string(simd::active().level));
  report.result = analyze(views, data.sample->m(), data.sample->n(), opts);
  emit(o.out, format == "csv" ? to_csv(report) : to_json(report), out);
}

void run_scatter(const DataOptions& o, std::size_t perms, std::ostream& out) {
  const Loaded data = load_data(o);
  const auto views = build_views(*data.sample, parse_views(o, data.order));
  const auto rows = scatter_data(weight_refs(views), data.sample->m(), data.sample->n(), perms, o.seed,
                                 resolve_threads(o.threads));
  std::string csv = "view,U_w,U_diff,is_observed\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.view) + "," + format_double(r.u_w) + "," + format_double(r.u_diff) + "," +
           (r.observed ? "1" : "0") + "\n";
  }
  emit(o.out, csv, out);
}

struct SimulateOptions {
  std::string scenario, pattern, config, out, records;
  Index d = 200, m = 50, n = 50;
  std::size_t reps = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::vector<std::string> params;
  bool quiet = false;
};

void run_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  std::vector<ScenarioSpec> scenarios;
  if (!o.config.empty()) {
    if (!o.scenario.empty()) throw InvalidArgument("--config and --scenario are exclusive");
    scenarios = catalog_from_json(read_file(o.config));
  } else {
    if (o.scenario.empty()) throw InvalidArgument("give --scenario or --config");
    scenarios.push_back(
        make_scenario(parse_family(o.scenario), parse_pattern(o.pattern), o.d, o.m, o.n, parse_params(o.params)));
  }
  std::string csv = "scenario,d,m,n,reps,alpha,rejection_rate,failures,seed\n";
  std::string records = "scenario,replication,T_S,p_value,failed\n";
  std::mutex progress_mutex;
  for (const auto& spec : scenarios) {
    ExperimentConfig cfg;
    cfg.replications = o.reps;
    cfg.alpha = o.alpha;
    cfg.seed = o.seed;
    cfg.threads = resolve_threads(o.threads);
    std::atomic<std::size_t> reported{0};
    if (!o.quiet) {
      cfg.progress = [&, id = spec.id()](std::size_t done) {
        const std::size_t step = std::max<std::size_t>(1, o.reps / 10);
        if (done % step != 0 && done != o.reps) return;
        std::lock_guard lock(progress_mutex);
        if (done <= reported) return;
        reported = done;
        err << id << ": " << done << "/" << o.reps << " replications\n";
      };
    }
    const auto r = run_experiment(spec, cfg);
    csv += quote(spec.id()) + "," + std::to_string(spec.d) + "," + std::to_string(spec.m) + "," +
           std::to_string(spec.n) + "," + std::to_string(r.replications) + "," + format_double(r.alpha) + "," +
           format_double(r.rejection_rate) + "," + std::to_string(r.failures) + "," + std::to_string(r.seed) + "\n";
    for (std::size_t i = 0; i < r.records.size(); ++i) {
      const auto& rec = r.records[i];
      records += quote(spec.id()) + "," + std::to_string(i) + "," + format_double(rec.t_s) + "," +
                 format_double(rec.p_value) + "," + (rec.failed ? "1" : "0") + "\n";
    }
  }
  emit(o.out, csv, out);
  if (!o.records.empty()) write_atomic(o.records, records);
}

struct GenerateOptions {
  std::string scenario, pattern, x_out, y_out;
  Index d = 200, m = 50, n = 50;
  std::uint64_t seed = 0, replication = 0;
  std::vector<std::string> params;
};

std::string matrix_csv(const RowMatrix& block) {
  std::string out;
  for (Index j = 0; j < block.cols(); ++j) out += (j ? ",v" : "v") + std::to_string(j + 1);
  out += "\n";
  for (Index i = 0; i < block.rows(); ++i) {
    for (Index j = 0; j < block.cols(); ++j) out += (j ? "," : "") + format_double(block(i, j));
    out += "\n";
  }
  return out;
}

void run_generate(const GenerateOptions& o) {
  const auto spec = make_scenario(parse_family(o.scenario), parse_pattern(o.pattern), o.d, o.m, o.n,
                                  parse_params(o.params));
  const auto sample = generate(spec, o.seed, o.replication);
  write_atomic(o.x_out, matrix_csv(sample.values().topRows(sample.m())));
  write_atomic(o.y_out, matrix_csv(sample.values().bottomRows(sample.n())));
}

struct ReturnsCliOptions {
  std::string prices, date_column, split_date, before, after;
  double threshold = 0.0;
  bool log_returns = false;
};

void run_returns(const ReturnsCliOptions& o, std::ostream& err) {
  if (!(o.threshold >= 0.0 && o.threshold <= 1.0)) throw InvalidArgument("--drop-missing-threshold must lie in [0, 1]");
  ReturnsOptions opts;
  opts.split = parse_date(o.split_date);
  opts.drop_missing_threshold = o.threshold;
  opts.log_returns = o.log_returns;
  const auto panel = parse_prices(read_csv(o.prices), o.date_column);
  const auto r = compute_returns(panel, opts);
  write_atomic(o.before, returns_csv(r.assets, r.before));
  write_atomic(o.after, returns_csv(r.assets, r.after));
  err << r.assets.size() << " assets, " << r.before.rows() << " days before and " << r.after.rows()
      << " days from " << opts.split.str();
  if (!r.dropped.empty()) {
    err << "; dropped";
    for (const auto& a : r.dropped) err << " " << a;
  }
  err << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-view aggregated graph-based two-sample test"};
  app.name("mates");
  app.require_subcommand(1);

  DataOptions test_opts;
  std::string method = "asymptotic", format = "json";
  std::size_t test_perms = 1000;
  bool no_diagnostics = false;
  auto* test = app.add_subcommand("test", "run the test on two samples");
  add_data_options(test, test_opts);
  test->add_option("--method", method, "asymptotic | permutation | both")
      ->check(CLI::IsMember({"asymptotic", "permutation", "both"}));
  test->add_option("--perms", test_perms, "permutations for --method permutation|both")->check(CLI::Range(1ul, 100000000ul));
  test->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  test->add_flag("--no-diagnostics", no_diagnostics, "skip the condition diagnostics");

  DataOptions scatter_opts;
  std::size_t scatter_perms = 1000;
  auto* scatter = app.add_subcommand("scatter", "observed and permuted (U_w, U_diff) per view");
  add_data_options(scatter, scatter_opts);
  scatter->add_option("--perms", scatter_perms, "permutations")->check(CLI::Range(0ul, 100000000ul));

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "empirical size or power of a simulation scenario");
  simulate->add_option("--scenario", sim.scenario, "null-a..null-e or alt-I..alt-V");
  simulate->add_option("--pattern", sim.pattern, "i | ii | iii | iv (alternatives)");
  simulate->add_option("--d", sim.d, "dimension")->check(CLI::PositiveNumber);
  simulate->add_option("--m", sim.m, "X sample size")->check(CLI::Range(Index{2}, Index{1} << 40));
  simulate->add_option("--n", sim.n, "Y sample size")->check(CLI::Range(Index{2}, Index{1} << 40));
  simulate->add_option("--reps", sim.reps, "replications")->check(CLI::Range(1ul, 100000000ul));
  simulate->add_option("--alpha", sim.alpha, "significance level")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--threads", sim.threads, "worker threads (0: MATES_THREADS or all cores)");
  simulate->add_option("--param", sim.params, "override a parameter, NAME=VALUE (repeatable)");
  simulate->add_option("--config", sim.config, "scenario catalog JSON; runs every entry");
  simulate->add_option("--records", sim.records, "also write per-replication T_S and p to this CSV");
  simulate->add_option("--out", sim.out, "output CSV (default stdout)");
  simulate->add_flag("--quiet", sim.quiet, "no progress on stderr");

  GenerateOptions gen;
  auto* generate_cmd = app.add_subcommand("generate", "draw one data set from a scenario into two CSVs");
  generate_cmd->add_option("--scenario", gen.scenario, "null-a..null-e or alt-I..alt-V")->required();
  generate_cmd->add_option("--pattern", gen.pattern, "i | ii | iii | iv (alternatives)");
  generate_cmd->add_option("--d", gen.d, "dimension")->check(CLI::PositiveNumber);
  generate_cmd->add_option("--m", gen.m, "X sample size")->check(CLI::Range(Index{2}, Index{1} << 40));
  generate_cmd->add_option("--n", gen.n, "Y sample size")->check(CLI::Range(Index{2}, Index{1} << 40));
  generate_cmd->add_option("--seed", gen.seed, "master seed");
  generate_cmd->add_option("--replication", gen.replication, "replication index (stream)");
  generate_cmd->add_option("--param", gen.params, "override a parameter, NAME=VALUE (repeatable)");
  generate_cmd->add_option("--x-out", gen.x_out, "CSV for the X rows")->required();
  generate_cmd->add_option("--y-out", gen.y_out, "CSV for the Y rows")->required();

  std::string catalog_out;
  auto* catalog = app.add_subcommand("catalog", "write the default scenario catalog as JSON");
  catalog->add_option("--out", catalog_out, "output file (default stdout)");

  ReturnsCliOptions ret;
  auto* returns = app.add_subcommand("returns", "daily returns before and after a split date");
  returns->add_option("--prices", ret.prices, "price CSV: a date column and one column per asset")->required();
  returns->add_option("--date-column", ret.date_column, "name of the date column (default: first column)");
  returns->add_option("--split-date", ret.split_date, "first day of the after block, YYYY-MM-DD")->required();
  returns->add_option("--drop-missing-threshold", ret.threshold,
                      "drop assets whose fraction of missing prices exceeds this (default 0)");
  returns->add_flag("--log-returns", ret.log_returns, "log returns instead of simple returns");
  returns->add_option("--before", ret.before, "output CSV for days before the split")->required();
  returns->add_option("--after", ret.after, "output CSV for days from the split on")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (test->parsed()) run_test(test_opts, method, test_perms, format, !no_diagnostics, out);
    if (scatter->parsed()) run_scatter(scatter_opts, scatter_perms, out);
    if (simulate->parsed()) run_simulate(sim, out, err);
    if (generate_cmd->parsed()) run_generate(gen);
    if (catalog->parsed()) emit(catalog_out, catalog_to_json(default_catalog()), out);
    if (returns->parsed()) run_returns(ret, err);
  } catch (const InvalidArgument& e) {
    err << "mates: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "mates: " << e.what() << "\n";
    return kData;
  } catch (const Degenerate& e) {
    err << "mates: degenerate statistic: " << e.what() << "\n";
    return kDegenerate;
  } catch (const std::exception& e) {
    err << "mates: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}

}  // namespace mates::cli
