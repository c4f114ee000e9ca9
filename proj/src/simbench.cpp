#include "mates/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>

#include "mates/core.hpp"
#include "mates/error.hpp"
#include "mates/inference.hpp"
#include "mates/parallel.hpp"
#include "mates/samplers.hpp"

namespace mates {
namespace {

constexpr std::uint64_t kDataTag = 0x64617461;  // "data"

enum class Law { normal, t, mixture, gennorm, gamma, lognormal };

// One coordinate's marginal. `scale` multiplies the draw (used for t
// standardization and normal standard deviations).
struct Marginal {
  Law law = Law::normal;
  double a = 0.0;
  double b = 0.0;
  double scale = 1.0;
};

double draw(samplers::Rng& rng, const Marginal& g) {
  switch (g.law) {
    case Law::normal: return samplers::normal(rng, 0.0, g.scale);
    case Law::t: return g.scale * samplers::student_t(rng, g.a);
    case Law::mixture: return samplers::symmetric_mixture(rng, g.a);
    case Law::gennorm: return samplers::generalized_normal(rng, g.a, g.b);
    case Law::gamma: return samplers::gamma(rng, g.a, g.b);
    case Law::lognormal: return samplers::lognormal(rng, 0.0, g.a);
  }
  return 0.0;
}

struct Marginals {
  std::vector<Marginal> x, y;
};

// X law and its moment-matched Y law for one coordinate of an alternative,
// given that coordinate's main parameter.
std::pair<Marginal, Marginal> alt_pair(const ScenarioSpec& s, double value) {
  switch (s.family) {
    case Family::alt_I:
      return {{Law::t, value}, {Law::normal, 0, 0, std::sqrt(samplers::t_variance(value))}};
    case Family::alt_II:
      return {{Law::mixture, value}, {Law::normal, 0, 0, std::sqrt(1.0 + value * value)}};
    case Family::alt_III: {
      const double alpha = s.params.at("alpha");
      return {{Law::gennorm, alpha, value},
              {Law::normal, 0, 0, std::sqrt(samplers::generalized_normal_variance(alpha, value))}};
    }
    case Family::alt_IV: {
      const auto g = samplers::gamma_matching(samplers::lognormal_mean(0.0, value),
                                              samplers::lognormal_variance(0.0, value));
      return {{Law::lognormal, value}, {Law::gamma, g.shape, g.scale}};
    }
    case Family::alt_V: {
      const double x_df = s.params.at("x_df");
      return {{Law::t, x_df, 0, 1.0 / std::sqrt(samplers::t_variance(x_df))},
              {Law::t, value, 0, 1.0 / std::sqrt(samplers::t_variance(value))}};
    }
    default: break;
  }
  throw InvalidArgument("not an alternative scenario");
}

Marginals alt_marginals(const ScenarioSpec& s, samplers::Rng& rng) {
  const std::string base = s.family == Family::alt_I     ? "df"
                           : s.family == Family::alt_II  ? "mu"
                           : s.family == Family::alt_III ? "beta"
                           : s.family == Family::alt_IV  ? "sigma"
                                                         : "y_df";
  const auto d = static_cast<std::size_t>(s.d);
  Marginals out;
  out.x.resize(d);
  out.y.resize(d);
  if (s.pattern == Pattern::directional) {
    std::uniform_real_distribution<double> u(s.params.at(base + "_low"), s.params.at(base + "_high"));
    std::vector<double> values(d);
    for (auto& v : values) v = u(rng);
    for (std::size_t j = 0; j < d; ++j) std::tie(out.x[j], out.y[j]) = alt_pair(s, values[j]);
    return out;
  }
  const auto [x, y] = alt_pair(s, s.params.at(base));
  std::fill(out.x.begin(), out.x.end(), x);
  std::fill(out.y.begin(), out.y.end(), y);
  if (s.pattern == Pattern::partial) {
    // Only the first ceil(d/3) coordinates differ.
    const std::size_t differ = (d + 2) / 3;
    for (std::size_t j = differ; j < d; ++j) out.y[j] = out.x[j];
  }
  return out;
}

Marginal null_marginal(const ScenarioSpec& s) {
  switch (s.family) {
    case Family::null_a: return {Law::normal, 0, 0, 1.0};
    case Family::null_c: return {Law::gennorm, s.params.at("alpha"), s.params.at("beta")};
    case Family::null_d: return {Law::t, s.params.at("df")};
    case Family::null_e: return {Law::gamma, s.params.at("shape"), 1.0 / s.params.at("rate")};
    default: break;
  }
  throw InvalidArgument("no per-coordinate law for " + s.id());
}

}  // namespace

SampleMatrix generate(const ScenarioSpec& spec, std::uint64_t seed, std::uint64_t replication) {
  validate(spec);
  auto rng = make_stream(seed, replication, kDataTag);
  const Index m = spec.m, n = spec.n, d = spec.d;
  RowMatrix z(m + n, d);

  if (spec.family == Family::null_b) {
    // Each row is centred at +shift*1 or -shift*1 with equal probability.
    const double shift = spec.params.at("shift");
    std::bernoulli_distribution coin(0.5);
    for (Index i = 0; i < m + n; ++i) {
      const double centre = coin(rng) ? shift : -shift;
      for (Index j = 0; j < d; ++j) z(i, j) = centre + samplers::normal(rng);
    }
    return SampleMatrix(std::move(z), m, n);
  }

  Marginals g;
  if (is_null(spec.family)) {
    const Marginal one = null_marginal(spec);
    g.x.assign(static_cast<std::size_t>(d), one);
    g.y = g.x;
  } else {
    g = alt_marginals(spec, rng);
  }
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < d; ++j) z(i, j) = draw(rng, g.x[static_cast<std::size_t>(j)]);
  }
  for (Index i = m; i < m + n; ++i) {
    for (Index j = 0; j < d; ++j) z(i, j) = draw(rng, g.y[static_cast<std::size_t>(j)]);
  }
  if (spec.pattern == Pattern::correlated) {
    const auto& root = samplers::ar_correlation_sqrt(d, spec.params.at("rho"));
    // Row-wise Y = Sigma^{1/2} Y'; the root is symmetric.
    RowMatrix y = z.bottomRows(n) * root;
    z.bottomRows(n) = y;
  }
  return SampleMatrix(std::move(z), m, n);
}

ExperimentResult run_experiment(const ScenarioSpec& spec, const ExperimentConfig& config) {
  if (config.replications < 1) throw InvalidArgument("replications must be at least 1");
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
  validate(spec);
  const auto start = std::chrono::steady_clock::now();

  ExperimentResult result;
  result.scenario = spec;
  result.replications = config.replications;
  result.alpha = config.alpha;
  result.seed = config.seed;
  result.records.resize(config.replications);

  std::atomic<std::size_t> done{0};
  const int dof = 2 * static_cast<int>(config.views.size());
  parallel_for(config.replications, resolve_threads(config.threads), [&](std::size_t r) {
    auto& rec = result.records[r];
    const auto sample = generate(spec, config.seed, r);
    try {
      const auto views = build_views(sample, config.views);
      const PermutationEngine engine(weight_refs(views), spec.m, spec.n);
      rec.t_s = engine.observed_t();
      rec.p_value = p_value_chi2(rec.t_s, dof);
    } catch (const Degenerate& e) {
      rec.failed = true;
      rec.error = e.what();
    }
    const auto finished = ++done;
    if (config.progress) config.progress(finished);
  });

  for (const auto& rec : result.records) {
    if (rec.failed) {
      ++result.failures;
    } else if (rec.p_value <= config.alpha) {
      ++result.rejections;
    }
  }
  // Allow at most 0.1% failed replications.
  if (result.failures * 1000 > result.replications) {
    throw Degenerate(std::to_string(result.failures) + " of " + std::to_string(result.replications) +
                     " replications of " + spec.id() + " had a singular covariance (first: " +
                     std::find_if(result.records.begin(), result.records.end(), [](const auto& r) {
                       return r.failed;
                     })->error + ")");
  }
  const auto valid = result.replications - result.failures;
  result.rejection_rate = valid ? static_cast<double>(result.rejections) / static_cast<double>(valid) : 0.0;
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace mates
