#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mates/core.hpp"

namespace mates {

/// Upper tail P(chi^2_dof >= t), via the regularized upper incomplete gamma
/// function Q(dof/2, t/2).
double p_value_chi2(double t, int dof);

/// Regularized upper incomplete gamma Q(a, x) for a > 0, x >= 0.
double gamma_q(double a, double x);

/// Draws uniformly random X-labellings against fixed weight matrices and
/// re-evaluates U_x, U_y and T_S. Draw b uses its own stream derived from
/// (seed, b), so results do not depend on the thread count.
class PermutationEngine {
 public:
  /// Throws SingularCovariance if the statistic is undefined; since the
  /// covariance depends only on the weights and (m, n), a labelling that
  /// passes once passes for every relabelling.
  PermutationEngine(const WeightRefs& weights, Index m, Index n);

  const ViewSums& observed_sums() const noexcept { return sums_; }
  const PermutationMoments& moments() const noexcept { return evaluator_.moments(); }
  const StatisticEvaluator& evaluator() const noexcept { return evaluator_; }
  double observed_t() const noexcept { return observed_t_; }

  /// Membership indicator (1.0 for X) of draw b.
  std::vector<double> draw_labels(std::uint64_t seed, std::uint64_t b) const;

  /// U_x and U_y of every view for a membership indicator.
  void group_sums(std::span<const double> in_x, Eigen::VectorXd& u_x, Eigen::VectorXd& u_y) const;

  double t_s(std::span<const double> in_x) const;

  Index size() const noexcept { return m_ + n_; }
  Index views() const noexcept { return static_cast<Index>(weights_.size()); }

 private:
  WeightRefs weights_;
  Index m_;
  Index n_;
  ViewSums sums_;
  StatisticEvaluator evaluator_;
  double observed_t_;
};

struct PermutationPValue {
  double p_value = 1.0;
  std::size_t exceedances = 0;  ///< draws with T_S >= observed
  std::size_t permutations = 0;
  double observed_t = 0.0;
};

/// (1 + #{T_S^perm >= T_S^obs}) / (B + 1).
PermutationPValue p_value_permutation(const PermutationEngine& engine, std::size_t permutations,
                                      std::uint64_t seed, unsigned threads = 1);
PermutationPValue p_value_permutation(const WeightRefs& weights, Index m, Index n,
                                      std::size_t permutations, std::uint64_t seed, unsigned threads = 1);

struct ScatterRow {
  int view = 0;  ///< 1-based
  double u_w = 0.0;
  double u_diff = 0.0;
  bool observed = false;
};

/// Observed (U_w, U_diff) per view followed by `permutations` relabelled
/// pairs per view, using the same draws as p_value_permutation.
std::vector<ScatterRow> scatter_data(const PermutationEngine& engine, std::size_t permutations,
                                     std::uint64_t seed, unsigned threads = 1);
std::vector<ScatterRow> scatter_data(const WeightRefs& weights, Index m, Index n,
                                     std::size_t permutations, std::uint64_t seed, unsigned threads = 1);

/// Finite-sample monitors for the asymptotic chi^2 approximation. A value of
/// nullopt marks a quantity whose normaliser vanishes ("degenerate").
struct ViewConditions {
  std::optional<double> cond1;        ///< N sum_i (sum_j W_ij^2)^2 / W2^2
  std::optional<double> cond2;        ///< sum_i |centred W_i.|^3 / W3~^{3/2}
  std::optional<double> cond3;        ///< max_i W_i. / sqrt(W2)
  std::optional<double> cond1_prime;  ///< max_i |centred W_i.| / sqrt(W3~)
  std::optional<double> gamma_hat;    ///< -log(cond1') / log N
  Index max_degree = 0;
  int k = 0;
  double degree_ratio = 0.0;  ///< max_degree / k
  double b0 = 0.0;            ///< aggregation weight 1 / sqrt(W2)

  bool operator==(const ViewConditions&) const = default;
};

struct ConditionReport {
  std::vector<ViewConditions> views;
  std::optional<double> cond4;
  std::optional<double> cond5;
  std::uint64_t n_squares = 0;  ///< 4-cycles in the support of the aggregated graph
  double beta_hat = 0.0;        ///< log k / log N, largest k over views
  double n_squares_ratio = 0.0; ///< n_squares / N^(2 beta_hat + 2)

  bool operator==(const ConditionReport&) const = default;
};

/// `ks` gives each view's graph size k (0 when unknown).
ConditionReport condition_diagnostics(const WeightRefs& weights, std::span<const int> ks);
ConditionReport condition_diagnostics(std::span<const WeightedView> views);

/// Number of 4-cycles (on four distinct vertices) in the graph whose edges
/// are the nonzero off-diagonal entries of `adjacency`.
std::uint64_t count_squares(const Eigen::MatrixXd& adjacency);

enum class PValueMethod { asymptotic, permutation, both };

struct AnalyzeOptions {
  PValueMethod method = PValueMethod::asymptotic;
  std::size_t permutations = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool diagnostics = true;
};

struct ViewResult {
  int view = 0;
  double u_x = 0.0, u_y = 0.0, u_w = 0.0, u_diff = 0.0;
  double mean_u_x = 0.0, mean_u_y = 0.0, mean_u_w = 0.0, mean_u_diff = 0.0;
  double t_prime = 0.0;
  double p_prime = 1.0;
};

struct MatesResult {
  double t_s = 0.0;
  int dof = 0;
  double p_asymptotic = 1.0;
  std::optional<double> p_permutation;
  std::optional<std::size_t> n_permutations;
  std::vector<ViewResult> views;
  ViewIndependenceReport independence;
  std::optional<ConditionReport> diagnostics;
};

/// Full test on prepared views: statistic, chi^2_{2S} p-value, optional
/// permutation p-value, rank report and diagnostics.
MatesResult analyze(std::span<const WeightedView> views, Index m, Index n, const AnalyzeOptions& options = {});

}  // namespace mates
