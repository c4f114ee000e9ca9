// Acceptance suite: one PASS/FAIL line per criterion. `--extended` adds the
// 1000-replication power run. Exit status is nonzero if any line fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#if MATES_HAVE_BOOST
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#endif

#include "json.hpp"
#include "mates/cli/commands.hpp"
#include "mates/core.hpp"
#include "mates/inference.hpp"
#include "mates/parallel.hpp"
#include "mates/pipeline.hpp"
#include "mates/simbench.hpp"
#include "support.hpp"

using namespace mates;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// ---------------------------------------------------------------- 1 and 2

void criteria_1_2() {
  std::mt19937_64 rng(20240601);
  const int fixtures = 40;
  double worst_mean = 0, worst_cov = 0, worst_orth = 0, worst_t = 0;
  int compared = 0;
  const auto start = Clock::now();
  std::vector<testing::Fixture> all;
  for (int f = 0; f < fixtures; ++f) {
    auto fx = testing::random_fixture(rng);
    const auto e = testing::enumerate_moments(fx.weights, fx.m, fx.n);
    const auto sums = view_sums(weight_refs(fx.weights), fx.m, fx.n);
    const auto mo = permutation_moments(sums, fx.m, fx.n);
    Eigen::VectorXd mean(2 * sums.views());
    for (Index s = 0; s < sums.views(); ++s) {
      mean(2 * s) = mo.mu_x(s);
      mean(2 * s + 1) = mo.mu_y(s);
    }
    worst_mean = std::max(worst_mean, testing::rel_error(mean, e.mean));
    worst_cov = std::max(worst_cov, testing::rel_error(mo.sigma_s, e.cov));
    all.push_back(std::move(fx));
  }
  const double t1 = seconds_since(start);
  report(1, worst_mean <= 1e-10 && worst_cov <= 1e-10 && t1 < 5.0,
         fmt("%.0f fixtures, max rel err mean %.2e, cov %.2e (<= 1e-10), %.2f s (< 5 s)", fixtures, worst_mean,
             worst_cov, t1));

  const auto start2 = Clock::now();
  for (const auto& fx : all) {
    const auto e = testing::enumerate_moments(fx.weights, fx.m, fx.n);
    const double scale = std::max(e.cov_w.cwiseAbs().maxCoeff(), e.cov_diff.cwiseAbs().maxCoeff());
    worst_orth = std::max(worst_orth, scale > 0 ? e.cov_w_diff.cwiseAbs().maxCoeff() / scale : 0.0);
    const auto sums = view_sums(weight_refs(fx.weights), fx.m, fx.n);
    const auto mo = permutation_moments(sums, fx.m, fx.n);
    try {
      const double two_term = statistic(sums, mo).t_s;
      const double full = statistic_full_form(sums, mo);
      worst_t = std::max(worst_t, std::abs(two_term - full) / std::max(1.0, std::abs(full)));
      ++compared;
    } catch (const SingularCovariance&) {
    }
  }
  const double t2 = seconds_since(start2);
  report(2, worst_orth <= 1e-10 && worst_t <= 1e-8 && compared >= 20 && t2 < 5.0,
         fmt("max |Cov(v_w, v_diff)| rel %.2e (<= 1e-10); T_S two-term vs full form %.2e (<= 1e-8) on %.0f "
             "fixtures; %.2f s",
             worst_orth, worst_t, static_cast<double>(compared), t2));
}

// ---------------------------------------------------------------- 3

void criterion_3() {
  const auto start = Clock::now();
  std::mt19937_64 rng(33);
  const Index m = 6, n = 7;
  const SampleMatrix sample(testing::random_points(rng, m + n, 5), m, n);
  GraphSpec g;
  g.k = 4;
  const auto v1 = build_view(moment_manhattan(sample, 1), g).weights;
  const auto v2 = build_view(moment_manhattan(sample, 2), g).weights;

  auto implicated = [&](const std::vector<Eigen::MatrixXd>& ws, std::vector<int>& w, std::vector<int>& diff) {
    try {
      evaluate(weight_refs(ws), m, n);
    } catch (const SingularCovariance& e) {
      if (!e.report()) return false;
      w = e.report()->singular_views_w;
      diff = e.report()->singular_views_diff;
      return true;
    }
    return false;
  };
  bool ok = true;
  std::string detail;
  std::vector<int> w, diff;
  const bool dup = implicated({v1, v2, v1}, w, diff);
  ok = ok && dup && w == std::vector<int>{3} && diff == std::vector<int>{3};
  detail += dup ? "duplicate: singular, implicated view 3" : "duplicate: NOT singular";
  const bool scaled = implicated({v1, 2.5 * v2, v2}, w, diff);
  ok = ok && scaled && w == std::vector<int>{3} && diff == std::vector<int>{3};
  detail += scaled ? "; scaled: singular, implicated view 3" : "; scaled: NOT singular";

  Eigen::MatrixXd noisy = v1;
  std::uniform_real_distribution<double> u(0.0, 0.05);
  for (Index i = 0; i < m + n; ++i) {
    for (Index j = i + 1; j < m + n; ++j) noisy(i, j) = noisy(j, i) = v1(i, j) + u(rng);
  }
  bool restored = true;
  try {
    const std::vector<Eigen::MatrixXd> ws{v1, v2, noisy};
    const auto ev = evaluate(weight_refs(ws), m, n);
    restored = is_positive_definite(ev.moments.sigma_w) && is_positive_definite(ev.moments.sigma_diff) &&
               independence_report(weight_refs(ws), m, n).full_rank();
  } catch (const SingularCovariance&) {
    restored = false;
  }
  ok = ok && restored;
  detail += restored ? "; perturbed duplicate: PD" : "; perturbed duplicate: still singular";
  const double t = seconds_since(start);
  report(3, ok && t < 1.0, detail + fmt("; %.3f s (< 1 s)", t));
}

// ---------------------------------------------------------------- 4 to 7

struct SimOutputs {
  ExperimentResult size, power, spot_iv, spot_i_ii;
  std::vector<double> p_asym, p_perm;
};

ExperimentResult experiment(Family f, Pattern p, Index d, std::size_t reps, std::uint64_t seed, unsigned threads) {
  ExperimentConfig cfg;
  cfg.replications = reps;
  cfg.seed = seed;
  cfg.threads = threads;
  return run_experiment(make_scenario(f, p, d), cfg);
}

void agreement_runs(unsigned threads, std::vector<double>& p_asym, std::vector<double>& p_perm) {
  const auto spec = make_scenario(Family::null_a, Pattern::none, 200);
  const std::size_t reps = 100;
  p_asym.assign(reps, 0.0);
  p_perm.assign(reps, 0.0);
  const auto views = default_views();
  parallel_for(reps, threads, [&](std::size_t r) {
    const auto sample = generate(spec, 7007, r);
    const auto built = build_views(sample, views);
    const PermutationEngine engine(weight_refs(built), sample.m(), sample.n());
    p_asym[r] = p_value_chi2(std::max(engine.observed_t(), 0.0), 2 * static_cast<int>(built.size()));
    p_perm[r] = p_value_permutation(engine, 500, 9000 + r, 1).p_value;
  });
}

SimOutputs simulation_runs(unsigned threads) {
  SimOutputs o;
  o.size = experiment(Family::null_a, Pattern::none, 200, 1000, 4004, threads);
  o.power = experiment(Family::alt_I, Pattern::full, 200, 300, 5005, threads);
  o.spot_iv = experiment(Family::alt_IV, Pattern::full, 500, 200, 6006, threads);
  o.spot_i_ii = experiment(Family::alt_I, Pattern::partial, 200, 200, 6007, threads);
  agreement_runs(threads, o.p_asym, o.p_perm);
  return o;
}

// Asymptotic Kolmogorov tail with the Stephens small-sample correction.
double ks_p_value(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - p[i], p[i] - static_cast<double>(i) / n});
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double q = 0;
  for (int k = 1; k <= 100; ++k) q += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(q, 0.0, 1.0);
}

std::vector<double> p_values(const ExperimentResult& r) {
  std::vector<double> out;
  for (const auto& rec : r.records) {
    if (!rec.failed) out.push_back(rec.p_value);
  }
  return out;
}

void criteria_4_to_7(const SimOutputs& o, double seconds) {
  const double size = o.size.rejection_rate;
  report(4, size >= 0.035 && size <= 0.068,
         fmt("null-a d=200 m=n=50, 1000 reps: size %.3f in [0.035, 0.068] (published 0.053); failures %.0f", size,
             static_cast<double>(o.size.failures)));

  const double power = o.power.rejection_rate;
  report(5, power >= 0.80, fmt("alt-I(i) d=200, 300 reps: power %.3f (>= 0.80; published 0.909)", power));

  const double iv = o.spot_iv.rejection_rate, i_ii = o.spot_i_ii.rejection_rate;
  report(6, std::abs(iv - 0.899) <= 0.10 && std::abs(i_ii - 0.803) <= 0.10,
         fmt("200 reps: alt-IV(i) d=500 %.3f vs 0.899, alt-I(ii) d=200 %.3f vs 0.803 (tolerance 0.10)", iv, i_ii));

  std::vector<double> gaps(o.p_asym.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) gaps[i] = std::abs(o.p_asym[i] - o.p_perm[i]);
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  const double ks = ks_p_value(p_values(o.size));
  report(7, median < 0.05 && ks > 0.01,
         fmt("median |p_asym - p_perm| %.4f (< 0.05) over 100 reps, B=500; KS uniformity p %.3f (> 0.01) over %.0f "
             "null reps; simulations %.1f s",
             median, ks, static_cast<double>(p_values(o.size).size()), seconds));
}

// ---------------------------------------------------------------- 8

void criterion_8() {
#if MATES_HAVE_BOOST
  using Big = boost::multiprecision::cpp_bin_float_50;
  auto oracle = [](double t, int dof) {
    const Big half_k = Big(dof) / 2;
    const Big log_norm = half_k * boost::multiprecision::log(Big(2)) + boost::math::lgamma(half_k);
    auto density = [&](Big x) -> Big {
      if (x <= 0) return dof == 2 ? boost::multiprecision::exp(-log_norm) : Big(0);
      return boost::multiprecision::exp((half_k - 1) * boost::multiprecision::log(x) - x / 2 - log_norm);
    };
    boost::math::quadrature::exp_sinh<Big> integrator;
    // 1e-20 relative is ample for a 1e-10 absolute check and keeps the run short.
    return static_cast<double>(integrator.integrate(density, Big(t), std::numeric_limits<Big>::infinity(), Big(1e-20)));
  };
  const auto start = Clock::now();
  double worst = 0;
  int points = 0;
  for (int dof : {2, 4, 8, 16}) {
    for (int i = 0; i <= 200; ++i) {
      const double t = 0.5 * i;
      worst = std::max(worst, std::abs(p_value_chi2(t, dof) - oracle(t, dof)));
      ++points;
    }
  }
  report(8, worst <= 1e-10,
         fmt("max |p_chi2 - quadrature| %.2e (<= 1e-10) over %.0f points, dof {2,4,8,16}, t in [0, 100]; %.1f s",
             worst, static_cast<double>(points), seconds_since(start)));
#else
  report(8, false, "Boost multiprecision quadrature not available at build time");
#endif
}

// ---------------------------------------------------------------- 9

class Scratch {
 public:
  Scratch() : path_(fs::temp_directory_path() / ("mates_acceptance_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path file(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

int run_cli(const std::vector<std::string>& args, std::string& out) {
  std::vector<const char*> argv{"mates"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  out = o.str();
  if (code != 0) std::fprintf(stderr, "mates %s: %s", args.front().c_str(), e.str().c_str());
  return code;
}

// 100 assets, 101 daily prices; the split leaves 50 returns on each side.
// With `shift`, post-split innovations are unit-variance t_5 instead of normal.
std::string price_panel(std::uint64_t seed, bool shift) {
  const int assets = 100, days = 101;
  auto rng = make_stream(seed, shift ? 1 : 0, 0x70616e656cULL);
  std::normal_distribution<double> normal;
  std::student_t_distribution<double> t5(5.0);
  const double t_scale = std::sqrt(3.0 / 5.0);
  std::uniform_real_distribution<double> start(20.0, 400.0), vol(0.005, 0.03);
  std::vector<double> price(assets), sigma(assets);
  for (int a = 0; a < assets; ++a) {
    price[a] = start(rng);
    sigma[a] = vol(rng);
  }
  std::ostringstream csv;
  csv.precision(17);
  csv << "date";
  for (int a = 0; a < assets; ++a) csv << ",A" << a;
  csv << "\n";
  for (int day = 0; day < days; ++day) {
    if (day > 0) {
      for (int a = 0; a < assets; ++a) {
        const double e = (shift && day > 50) ? t5(rng) * t_scale : normal(rng);
        price[a] *= 1.0 + sigma[a] * e;
      }
    }
    char date[16];
    std::snprintf(date, sizeof date, "2022-%02d-%02d", 1 + day / 28, 1 + day % 28);
    csv << date;
    for (int a = 0; a < assets; ++a) csv << "," << price[a];
    csv << "\n";
  }
  return csv.str();
}

struct PanelOutcome {
  std::vector<double> p_asym, p_perm;
  int errors = 0;
};

PanelOutcome panel_runs(bool shift, unsigned threads, const Scratch& dir) {
  PanelOutcome out;
  const std::string tag = std::string(shift ? "shift" : "flat") + std::to_string(threads);
  const std::string split = "2022-02-24";  // day 51
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto prices = dir.file(tag + "_prices.csv");
    std::ofstream(prices) << price_panel(seed, shift);
    const auto before = dir.file(tag + "_before.csv"), after = dir.file(tag + "_after.csv");
    std::string text;
    if (run_cli({"returns", "--prices", prices.string(), "--split-date", split, "--before", before.string(), "--after",
                 after.string()},
                text) != 0) {
      ++out.errors;
      continue;
    }
    if (run_cli({"test", "--x", before.string(), "--y", after.string(), "--method", "both", "--perms", "199",
                 "--seed", std::to_string(seed), "--threads", std::to_string(threads), "--no-diagnostics"},
                text) != 0) {
      ++out.errors;
      continue;
    }
    const auto j = nlohmann::json::parse(text);
    out.p_asym.push_back(j["p_asymptotic"].get<double>());
    out.p_perm.push_back(j["p_permutation"].get<double>());
  }
  return out;
}

double rate_below(const std::vector<double>& p, double alpha) {
  if (p.empty()) return 0.0;
  return static_cast<double>(std::count_if(p.begin(), p.end(), [&](double v) { return v <= alpha; })) /
         static_cast<double>(p.size());
}

// ---------------------------------------------------------------- 10

bool same_records(const ExperimentResult& a, const ExperimentResult& b) {
  if (a.records.size() != b.records.size() || a.rejections != b.rejections) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    if (std::memcmp(&a.records[i].t_s, &b.records[i].t_s, sizeof(double)) != 0) return false;
    if (std::memcmp(&a.records[i].p_value, &b.records[i].p_value, sizeof(double)) != 0) return false;
  }
  return true;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void extended() {
  const auto start = Clock::now();
  const auto r = experiment(Family::alt_I, Pattern::full, 200, 1000, 5005, 0);
  const double rate = r.rejection_rate;
  std::printf("%s extended: alt-I(i) d=200, 1000 reps: power %.3f vs 0.909 +- 0.03 (%.1f s)\n",
              std::abs(rate - 0.909) <= 0.03 ? "PASS" : "FAIL", rate, seconds_since(start));
  if (std::abs(rate - 0.909) > 0.03) ++failures;
}

}  // namespace

int main(int argc, char** argv) {
  bool run_extended = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--extended") == 0) {
      run_extended = true;
    } else {
      std::fprintf(stderr, "usage: %s [--extended]\n", argv[0]);
      return 2;
    }
  }

  criteria_1_2();
  criterion_3();

  auto start = Clock::now();
  const SimOutputs one = simulation_runs(1);
  criteria_4_to_7(one, seconds_since(start));

  criterion_8();

  Scratch dir;
  start = Clock::now();
  const auto shifted = panel_runs(true, 1, dir);
  const auto flat = panel_runs(false, 1, dir);
  const double power = rate_below(shifted.p_asym, 0.01), size = rate_below(flat.p_asym, 0.01);
  report(9, shifted.errors == 0 && flat.errors == 0 && power >= 0.5 && size <= 0.08,
         fmt("synthetic panels, 100 seeds at alpha 0.01: shift rejects %.2f (>= 0.5), no shift %.2f (<= 0.08); "
             "%.0f CLI errors; %.1f s",
             power, size, static_cast<double>(shifted.errors + flat.errors), seconds_since(start)));

  start = Clock::now();
  const SimOutputs four = simulation_runs(4);
  const auto shifted4 = panel_runs(true, 4, dir);
  const auto flat4 = panel_runs(false, 4, dir);
  const bool det_sim = same_records(one.size, four.size) && same_records(one.power, four.power) &&
                       same_records(one.spot_iv, four.spot_iv) && same_records(one.spot_i_ii, four.spot_i_ii);
  const bool det_agree = same_bits(one.p_asym, four.p_asym) && same_bits(one.p_perm, four.p_perm);
  const bool det_panel = same_bits(shifted.p_asym, shifted4.p_asym) && same_bits(shifted.p_perm, shifted4.p_perm) &&
                         same_bits(flat.p_asym, flat4.p_asym) && same_bits(flat.p_perm, flat4.p_perm);
  report(10, det_sim && det_agree && det_panel,
         std::string("threads 1 vs 4: criteria 4-6 records ") + (det_sim ? "identical" : "DIFFER") +
             ", criterion 7 p-values " + (det_agree ? "identical" : "DIFFER") + ", criterion 9 p-values " +
             (det_panel ? "identical" : "DIFFER") + fmt(" (%.1f s)", seconds_since(start)));

  if (run_extended) extended();
  return failures == 0 ? 0 : 1;
}
