#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mates/error.hpp"
#include "mates/graphs.hpp"

namespace mates {

/// Non-owning list of per-view symmetric weight matrices sharing one N.
using WeightRefs = std::vector<std::reference_wrapper<const Eigen::MatrixXd>>;

WeightRefs weight_refs(std::span<const WeightedView> views);
WeightRefs weight_refs(std::span<const Eigen::MatrixXd> weights);

/// Within-group edge-weight sums and the graph totals the permutation moments
/// are built from. Pair quantities are S x S, indexed by view.
struct ViewSums {
  Index m = 0;
  Index n = 0;
  Eigen::VectorXd u_x, u_y, u_w, u_diff;
  Eigen::VectorXd w1;
  Eigen::MatrixXd w2, w3;              ///< sum_ij W W', sum_i W_i. W'_i.
  Eigen::MatrixXd w2_tilde, w3_tilde;  ///< centred versions
  std::vector<Eigen::VectorXd> row_sums;
  std::vector<Eigen::VectorXd> centered_row_sums;

  Index views() const noexcept { return u_x.size(); }
  Index size() const noexcept { return m + n; }
};

/// The first m observations form group X.
ViewSums view_sums(const WeightRefs& weights, Index m, Index n);
inline ViewSums view_sums(std::span<const WeightedView> views, Index m, Index n) {
  return view_sums(weight_refs(views), m, n);
}

/// Group sums for an arbitrary labelling: `in_x[i]` is 1 for members of X and
/// 0 otherwise. Every caller that compares statistics across labellings goes
/// through this routine so equal label sets give bit-equal sums.
struct GroupSums {
  double u_x;
  double u_y;
};
GroupSums group_sums(const Eigen::MatrixXd& weights, std::span<const double> in_x,
                     std::span<const double> in_y);

/// Exact mean and covariance of (U_x, U_y) under uniform relabelling.
struct PermutationMoments {
  Index m = 0;
  Index n = 0;
  Eigen::VectorXd mu_x, mu_y;
  Eigen::VectorXd mu_w, mu_diff;
  /// Order (U_x^1, U_y^1, ..., U_x^S, U_y^S).
  Eigen::MatrixXd sigma_s;
  Eigen::MatrixXd sigma_w, sigma_diff;
  double c = 0.0;  ///< 2mn / (N(N-1)(N-2)(N-3))
};

PermutationMoments permutation_moments(const ViewSums& sums, Index m, Index n);

/// Rank diagnostics for the two covariance blocks.
struct ViewIndependenceReport {
  int views = 0;
  int rank_w = 0;
  int rank_diff = 0;
  /// 1-based views that add nothing to the span of the views before them.
  std::vector<int> singular_views_w;
  std::vector<int> singular_views_diff;
  std::vector<Eigen::MatrixXd> w_hat;  ///< centred weight matrices
  std::vector<Eigen::VectorXd> w_v;    ///< centred row sums

  bool full_rank() const noexcept { return rank_w == views && rank_diff == views; }
};

/// Numerical ranks use singular values above 1e-10 of the largest.
ViewIndependenceReport independence_report(const WeightRefs& weights, Index m, Index n);
inline ViewIndependenceReport independence_report(std::span<const WeightedView> views, Index m, Index n) {
  return independence_report(weight_refs(views), m, n);
}

/// Smallest eigenvalue above 1e-10 times the largest.
bool is_positive_definite(const Eigen::MatrixXd& sym);

class SingularCovariance : public Degenerate {
 public:
  SingularCovariance(bool w_singular, bool diff_singular,
                     std::optional<ViewIndependenceReport> report = std::nullopt);

  bool w_singular() const noexcept { return w_singular_; }
  bool diff_singular() const noexcept { return diff_singular_; }
  const std::optional<ViewIndependenceReport>& report() const noexcept { return report_; }

 private:
  bool w_singular_;
  bool diff_singular_;
  std::optional<ViewIndependenceReport> report_;
};

struct Statistic {
  double t_s = 0.0;
  std::vector<double> t_prime;  ///< single-view statistics, chi^2_2 under the null
  Eigen::VectorXd v_w, v_diff;  ///< centred U_w and U_diff
};

/// Factorized covariance blocks; reusable across relabellings because the
/// permutation covariance depends only on the weights and (m, n).
class StatisticEvaluator {
 public:
  /// Throws SingularCovariance (without a report) if either block is not PD.
  explicit StatisticEvaluator(PermutationMoments moments);

  Statistic operator()(const Eigen::VectorXd& u_x, const Eigen::VectorXd& u_y) const;
  double t_s(const Eigen::VectorXd& u_x, const Eigen::VectorXd& u_y) const;

  const PermutationMoments& moments() const noexcept { return moments_; }

 private:
  PermutationMoments moments_;
  Eigen::LLT<Eigen::MatrixXd> llt_w_;
  Eigen::LLT<Eigen::MatrixXd> llt_diff_;
};

/// T_S through the orthogonal U_w / U_diff decomposition.
Statistic statistic(const ViewSums& sums, const PermutationMoments& moments);

/// T_S = v^T Sigma_S^{-1} v on the interleaved 2S vector. Independent route
/// used to cross-check the decomposition; throws SingularCovariance if
/// Sigma_S is not PD.
double statistic_full_form(const ViewSums& sums, const PermutationMoments& moments);

/// Everything above for one labelling; attaches an independence report to
/// SingularCovariance before rethrowing.
struct Evaluation {
  ViewSums sums;
  PermutationMoments moments;
  Statistic statistic;
};
Evaluation evaluate(const WeightRefs& weights, Index m, Index n);
inline Evaluation evaluate(std::span<const WeightedView> views, Index m, Index n) {
  return evaluate(weight_refs(views), m, n);
}

}  // namespace mates
