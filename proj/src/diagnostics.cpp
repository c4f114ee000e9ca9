#include <cmath>

#include "mates/inference.hpp"

namespace mates {

std::uint64_t count_squares(const Eigen::MatrixXd& adjacency) {
  const Index n = adjacency.rows();
  Eigen::MatrixXd b = (adjacency.array() != 0.0).cast<double>();
  b.diagonal().setZero();
  // Common-neighbour counts; exact in double for any realistic N.
  const Eigen::MatrixXd common = b * b;
  std::uint64_t pairs = 0;
  for (Index l = 1; l < n; ++l) {
    for (Index i = 0; i < l; ++i) {
      const auto c = static_cast<std::uint64_t>(common(i, l));
      pairs += c * (c - (c > 0 ? 1 : 0)) / 2;
    }
  }
  // Each 4-cycle has two pairs of opposite corners.
  return pairs / 2;
}

ConditionReport condition_diagnostics(const WeightRefs& weights, std::span<const int> ks) {
  ConditionReport report;
  if (weights.empty()) return report;
  const Index n = weights.front().get().rows();
  const double dN = static_cast<double>(n);

  Eigen::MatrixXd aggregate = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd hub_score = Eigen::VectorXd::Zero(n);
  bool any_degenerate_w3 = false;
  int k_max = 0;

  for (std::size_t s = 0; s < weights.size(); ++s) {
    const Eigen::MatrixXd& w = weights[s].get();
    const Eigen::VectorXd rows = w.rowwise().sum();
    const double w1 = rows.sum();
    const Eigen::VectorXd centered = rows.array() - w1 / dN;
    const double w2 = w.squaredNorm();
    const double w3 = rows.squaredNorm();
    const double w3_tilde = centered.squaredNorm();
    const bool w2_ok = w2 > 0.0;
    // Centred row sums that vanish up to rounding mark a regular graph.
    const bool w3_ok = w3_tilde > 1e-24 * w3 && w3_tilde > 0.0;

    ViewConditions v;
    if (w2_ok) {
      const Eigen::VectorXd row_sq = w.array().square().rowwise().sum();
      v.cond1 = dN * row_sq.squaredNorm() / (w2 * w2);
      v.cond3 = rows.maxCoeff() / std::sqrt(w2);
      v.b0 = 1.0 / std::sqrt(w2);
      aggregate += v.b0 * w;
    }
    if (w3_ok) {
      v.cond2 = centered.array().abs().cube().sum() / std::pow(w3_tilde, 1.5);
      v.cond1_prime = centered.array().abs().maxCoeff() / std::sqrt(w3_tilde);
      if (*v.cond1_prime > 0.0 && n > 1) v.gamma_hat = -std::log(*v.cond1_prime) / std::log(dN);
      hub_score += (centered.array().abs() / std::sqrt(w3_tilde)).matrix();
    } else {
      any_degenerate_w3 = true;
    }
    Index max_degree = 0;
    for (Index i = 0; i < n; ++i) {
      Index deg = 0;
      for (Index j = 0; j < n; ++j) deg += (j != i && w(i, j) != 0.0) ? 1 : 0;
      max_degree = std::max(max_degree, deg);
    }
    v.max_degree = max_degree;
    v.k = s < ks.size() ? ks[s] : 0;
    v.degree_ratio = v.k > 0 ? static_cast<double>(max_degree) / v.k : 0.0;
    k_max = std::max(k_max, v.k);
    report.views.push_back(v);
  }

  if (!any_degenerate_w3) {
    // sum_l sum_{i != j} W_il W_jl a_i a_j
    const Eigen::VectorXd wa = aggregate * hub_score;
    const Eigen::VectorXd diag_terms = aggregate.array().square().matrix() * hub_score.array().square().matrix();
    report.cond4 = wa.squaredNorm() - diag_terms.sum();
  }
  {
    // Weighted closed walks over four distinct vertices: corners i and l are
    // opposite, the other two corners range over distinct common neighbours.
    const Eigen::MatrixXd paths = aggregate * aggregate;
    const Eigen::MatrixXd sq = aggregate.array().square().matrix();
    const Eigen::MatrixXd sq_paths = sq * sq;
    double total = 0.0;
    for (Index l = 0; l < n; ++l) {
      for (Index i = 0; i < n; ++i) {
        if (i != l) total += paths(i, l) * paths(i, l) - sq_paths(i, l);
      }
    }
    report.cond5 = std::max(total, 0.0);
  }
  report.n_squares = count_squares(aggregate);
  if (k_max > 0 && n > 1) {
    report.beta_hat = std::log(static_cast<double>(k_max)) / std::log(dN);
    report.n_squares_ratio =
        static_cast<double>(report.n_squares) / std::pow(dN, 2.0 * report.beta_hat + 2.0);
  }
  return report;
}

ConditionReport condition_diagnostics(std::span<const WeightedView> views) {
  std::vector<int> ks;
  for (const auto& v : views) ks.push_back(v.spec.k.value_or(0));
  return condition_diagnostics(weight_refs(views), ks);
}

}  // namespace mates
