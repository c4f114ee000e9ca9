#include "mates/inference.hpp"

#include <algorithm>
#include <numeric>

#include "mates/parallel.hpp"

namespace mates {
namespace {

constexpr std::uint64_t kPermutationTag = 0x7065726dULL;  // "perm"

}  // namespace

PermutationEngine::PermutationEngine(const WeightRefs& weights, Index m, Index n) try
    : weights_(weights),
      m_(m),
      n_(n),
      sums_(view_sums(weights, m, n)),
      evaluator_(permutation_moments(sums_, m, n)),
      observed_t_(evaluator_.t_s(sums_.u_x, sums_.u_y)) {
} catch (const SingularCovariance& e) {
  throw SingularCovariance(e.w_singular(), e.diff_singular(), independence_report(weights, m, n));
}

std::vector<double> PermutationEngine::draw_labels(std::uint64_t seed, std::uint64_t b) const {
  const auto total = static_cast<std::size_t>(m_ + n_);
  auto rng = make_stream(seed, b, kPermutationTag);
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < static_cast<std::size_t>(m_); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, total - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<double> in_x(total, 0.0);
  for (std::size_t i = 0; i < static_cast<std::size_t>(m_); ++i) in_x[order[i]] = 1.0;
  return in_x;
}

void PermutationEngine::group_sums(std::span<const double> in_x, Eigen::VectorXd& u_x,
                                   Eigen::VectorXd& u_y) const {
  std::vector<double> in_y(in_x.size());
  std::transform(in_x.begin(), in_x.end(), in_y.begin(), [](double v) { return 1.0 - v; });
  u_x.resize(views());
  u_y.resize(views());
  for (Index s = 0; s < views(); ++s) {
    const auto g = mates::group_sums(weights_[static_cast<std::size_t>(s)].get(), in_x, in_y);
    u_x(s) = g.u_x;
    u_y(s) = g.u_y;
  }
}

double PermutationEngine::t_s(std::span<const double> in_x) const {
  Eigen::VectorXd u_x, u_y;
  group_sums(in_x, u_x, u_y);
  return evaluator_.t_s(u_x, u_y);
}

PermutationPValue p_value_permutation(const PermutationEngine& engine, std::size_t permutations,
                                      std::uint64_t seed, unsigned threads) {
  if (permutations < 1) throw InvalidArgument("at least one permutation is required");
  const double observed = engine.observed_t();
  std::vector<char> exceeds(permutations, 0);
  parallel_for(permutations, threads, [&](std::size_t b) {
    const auto labels = engine.draw_labels(seed, b);
    exceeds[b] = engine.t_s(labels) >= observed ? 1 : 0;
  });
  PermutationPValue out;
  out.exceedances = static_cast<std::size_t>(std::count(exceeds.begin(), exceeds.end(), 1));
  out.permutations = permutations;
  out.observed_t = observed;
  out.p_value = static_cast<double>(out.exceedances + 1) / static_cast<double>(permutations + 1);
  return out;
}

PermutationPValue p_value_permutation(const WeightRefs& weights, Index m, Index n,
                                      std::size_t permutations, std::uint64_t seed, unsigned threads) {
  const PermutationEngine engine(weights, m, n);
  return p_value_permutation(engine, permutations, seed, threads);
}

std::vector<ScatterRow> scatter_data(const PermutationEngine& engine, std::size_t permutations,
                                     std::uint64_t seed, unsigned threads) {
  const auto views = static_cast<std::size_t>(engine.views());
  std::vector<ScatterRow> rows(views * (permutations + 1));
  const auto& sums = engine.observed_sums();
  for (std::size_t s = 0; s < views; ++s) {
    rows[s] = {static_cast<int>(s + 1), sums.u_w(static_cast<Index>(s)), sums.u_diff(static_cast<Index>(s)), true};
  }
  const double dm = static_cast<double>(sums.m);
  const double dn = static_cast<double>(sums.n);
  parallel_for(permutations, threads, [&](std::size_t b) {
    const auto labels = engine.draw_labels(seed, b);
    Eigen::VectorXd u_x, u_y;
    engine.group_sums(labels, u_x, u_y);
    for (std::size_t s = 0; s < views; ++s) {
      const auto i = static_cast<Index>(s);
      const double u_w = ((dn - 1.0) * u_x(i) + (dm - 1.0) * u_y(i)) / (dm + dn - 2.0);
      rows[views * (b + 1) + s] = {static_cast<int>(s + 1), u_w, u_x(i) - u_y(i), false};
    }
  });
  return rows;
}

std::vector<ScatterRow> scatter_data(const WeightRefs& weights, Index m, Index n,
                                     std::size_t permutations, std::uint64_t seed, unsigned threads) {
  const PermutationEngine engine(weights, m, n);
  return scatter_data(engine, permutations, seed, threads);
}

MatesResult analyze(std::span<const WeightedView> views, Index m, Index n, const AnalyzeOptions& options) {
  const WeightRefs weights = weight_refs(views);
  const PermutationEngine engine(weights, m, n);
  const auto& sums = engine.observed_sums();
  const auto& moments = engine.moments();
  const Statistic stat = engine.evaluator()(sums.u_x, sums.u_y);

  MatesResult out;
  out.t_s = stat.t_s;
  out.dof = static_cast<int>(2 * sums.views());
  out.p_asymptotic = p_value_chi2(std::max(stat.t_s, 0.0), out.dof);
  for (Index s = 0; s < sums.views(); ++s) {
    ViewResult v;
    v.view = static_cast<int>(s + 1);
    v.u_x = sums.u_x(s);
    v.u_y = sums.u_y(s);
    v.u_w = sums.u_w(s);
    v.u_diff = sums.u_diff(s);
    v.mean_u_x = moments.mu_x(s);
    v.mean_u_y = moments.mu_y(s);
    v.mean_u_w = moments.mu_w(s);
    v.mean_u_diff = moments.mu_diff(s);
    v.t_prime = stat.t_prime[static_cast<std::size_t>(s)];
    v.p_prime = p_value_chi2(std::max(v.t_prime, 0.0), 2);
    out.views.push_back(v);
  }
  if (options.method != PValueMethod::asymptotic) {
    const auto perm = p_value_permutation(engine, options.permutations, options.seed, options.threads);
    out.p_permutation = perm.p_value;
    out.n_permutations = perm.permutations;
  }
  out.independence = independence_report(weights, m, n);
  if (options.diagnostics) out.diagnostics = condition_diagnostics(views);
  return out;
}

}  // namespace mates
