#include "mates/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <string>

#include "mates/simd/kernels.hpp"

namespace mates {
namespace {

void check_weights(const WeightRefs& weights, Index m, Index n) {
  if (weights.empty()) throw InvalidArgument("at least one view is required");
  const Index total = m + n;
  for (std::size_t s = 0; s < weights.size(); ++s) {
    const auto& w = weights[s].get();
    if (w.rows() != total || w.cols() != total) {
      throw InvalidArgument("view " + std::to_string(s + 1) + " has a " + std::to_string(w.rows()) +
                            "x" + std::to_string(w.cols()) + " weight matrix but N = " +
                            std::to_string(total));
    }
    if (w != w.transpose()) {
      throw InvalidArgument("view " + std::to_string(s + 1) + " has an asymmetric weight matrix");
    }
  }
}

double flat_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return simd::active().dot(a.data(), b.data(), static_cast<std::size_t>(a.size()));
}

double vec_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return simd::active().dot(a.data(), b.data(), static_cast<std::size_t>(a.size()));
}

/// Off-diagonal entries shifted by the mean off-diagonal weight.
Eigen::MatrixXd center_off_diagonal(const Eigen::MatrixXd& w, double w1) {
  const Index n = w.rows();
  Eigen::MatrixXd c = w.array() - w1 / static_cast<double>(n * (n - 1));
  c.diagonal().setZero();
  return c;
}

int numerical_rank(const Eigen::MatrixXd& columns, double scale) {
  if (columns.cols() == 0 || scale <= 0.0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-10 * scale) ++rank;
  }
  return rank;
}

/// Rank of the stacked columns, and the views that fail to enlarge the span
/// of the views before them.
void greedy_rank(const Eigen::MatrixXd& columns, int& rank, std::vector<int>& dependent) {
  const Index s_count = columns.cols();
  double scale = 0.0;
  if (s_count > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns);
    scale = svd.singularValues()(0);
  }
  rank = numerical_rank(columns, scale);
  dependent.clear();
  std::vector<Index> basis;
  int basis_rank = 0;
  for (Index s = 0; s < s_count; ++s) {
    Eigen::MatrixXd trial(columns.rows(), static_cast<Index>(basis.size()) + 1);
    for (std::size_t b = 0; b < basis.size(); ++b) trial.col(static_cast<Index>(b)) = columns.col(basis[b]);
    trial.col(trial.cols() - 1) = columns.col(s);
    const int r = numerical_rank(trial, scale);
    if (r > basis_rank) {
      basis.push_back(s);
      basis_rank = r;
    } else {
      dependent.push_back(static_cast<int>(s + 1));
    }
  }
}

}  // namespace

WeightRefs weight_refs(std::span<const WeightedView> views) {
  WeightRefs refs;
  refs.reserve(views.size());
  for (const auto& v : views) refs.emplace_back(v.weights);
  return refs;
}

WeightRefs weight_refs(std::span<const Eigen::MatrixXd> weights) {
  return WeightRefs(weights.begin(), weights.end());
}

GroupSums group_sums(const Eigen::MatrixXd& weights, std::span<const double> in_x,
                     std::span<const double> in_y) {
  const auto& k = simd::active();
  const auto n = static_cast<std::size_t>(weights.rows());
  double u_x = 0.0;
  double u_y = 0.0;
  // Columns double as rows: the matrix is symmetric and column-major.
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = weights.data() + i * n;
    if (in_x[i] != 0.0) u_x += k.dot(row, in_x.data(), n);
    if (in_y[i] != 0.0) u_y += k.dot(row, in_y.data(), n);
  }
  return {u_x, u_y};
}

ViewSums view_sums(const WeightRefs& weights, Index m, Index n) {
  if (m < 1 || n < 1) throw InvalidArgument("group sizes must be positive");
  check_weights(weights, m, n);
  const Index total = m + n;
  const auto views = static_cast<Index>(weights.size());
  const auto& k = simd::active();

  ViewSums out;
  out.m = m;
  out.n = n;
  out.u_x.resize(views);
  out.u_y.resize(views);
  out.u_w.resize(views);
  out.u_diff.resize(views);
  out.w1.resize(views);
  out.w2.resize(views, views);
  out.w3.resize(views, views);
  out.w2_tilde.resize(views, views);
  out.w3_tilde.resize(views, views);

  std::vector<double> in_x(static_cast<std::size_t>(total), 0.0);
  std::vector<double> in_y(static_cast<std::size_t>(total), 0.0);
  std::fill(in_x.begin(), in_x.begin() + m, 1.0);
  std::fill(in_y.begin() + m, in_y.end(), 1.0);

  const double nm2 = static_cast<double>(total - 2);
  std::vector<Eigen::MatrixXd> centered;
  centered.reserve(weights.size());
  for (Index s = 0; s < views; ++s) {
    const Eigen::MatrixXd& w = weights[s].get();
    const auto g = group_sums(w, in_x, in_y);
    out.u_x(s) = g.u_x;
    out.u_y(s) = g.u_y;
    out.u_w(s) = (static_cast<double>(n - 1) * g.u_x + static_cast<double>(m - 1) * g.u_y) / nm2;
    out.u_diff(s) = g.u_x - g.u_y;

    Eigen::VectorXd rows(total);
    for (Index i = 0; i < total; ++i) {
      rows(i) = k.sum(w.data() + i * total, static_cast<std::size_t>(total));
    }
    out.w1(s) = k.sum(rows.data(), static_cast<std::size_t>(total));
    out.row_sums.push_back(rows);
    out.centered_row_sums.push_back(rows.array() - out.w1(s) / static_cast<double>(total));
    centered.push_back(center_off_diagonal(w, out.w1(s)));
  }

  for (Index s = 0; s < views; ++s) {
    for (Index t = s; t < views; ++t) {
      const double w2 = flat_dot(weights[s].get(), weights[t].get());
      const double w3 = vec_dot(out.row_sums[s], out.row_sums[t]);
      const double w2t = flat_dot(centered[s], centered[t]);
      const double w3t = vec_dot(out.centered_row_sums[s], out.centered_row_sums[t]);
      out.w2(s, t) = out.w2(t, s) = w2;
      out.w3(s, t) = out.w3(t, s) = w3;
      out.w2_tilde(s, t) = out.w2_tilde(t, s) = w2t;
      out.w3_tilde(s, t) = out.w3_tilde(t, s) = w3t;
    }
  }
  return out;
}

PermutationMoments permutation_moments(const ViewSums& sums, Index m, Index n) {
  const Index total = m + n;
  if (total < 4) throw InvalidArgument("permutation covariance needs N >= 4");
  if (sums.m != m || sums.n != n) throw InvalidArgument("group sizes differ from the sums");
  const double dm = static_cast<double>(m);
  const double dn = static_cast<double>(n);
  const double dN = static_cast<double>(total);
  const Index views = sums.views();

  PermutationMoments out;
  out.m = m;
  out.n = n;
  out.c = 2.0 * dm * dn / (dN * (dN - 1.0) * (dN - 2.0) * (dN - 3.0));
  out.mu_x = (dm * (dm - 1.0) / (dN * (dN - 1.0))) * sums.w1;
  out.mu_y = (dn * (dn - 1.0) / (dN * (dN - 1.0))) * sums.w1;
  out.mu_w = ((dn - 1.0) * out.mu_x + (dm - 1.0) * out.mu_y) / (dN - 2.0);
  out.mu_diff = out.mu_x - out.mu_y;

  out.sigma_s.resize(2 * views, 2 * views);
  const double c = out.c;
  for (Index s = 0; s < views; ++s) {
    for (Index t = 0; t < views; ++t) {
      const double a = sums.w2_tilde(s, t);
      const double b = sums.w3_tilde(s, t);
      out.sigma_s(2 * s, 2 * t) = c * (dm - 1.0) * ((dn - 1.0) * a + 2.0 * (dm - 2.0) * b);
      out.sigma_s(2 * s + 1, 2 * t + 1) = c * (dn - 1.0) * ((dm - 1.0) * a + 2.0 * (dn - 2.0) * b);
      out.sigma_s(2 * s, 2 * t + 1) = c * (dm - 1.0) * (dn - 1.0) * (a - 2.0 * b);
      out.sigma_s(2 * s + 1, 2 * t) = c * (dm - 1.0) * (dn - 1.0) * (a - 2.0 * b);
    }
  }

  const double kw = 2.0 * dm * dn * (dm - 1.0) * (dn - 1.0) /
                    (dN * (dN - 1.0) * (dN - 2.0) * (dN - 3.0));
  out.sigma_w = kw * (sums.w2_tilde - (2.0 / (dN - 2.0)) * sums.w3_tilde);
  out.sigma_diff = (4.0 * dm * dn / (dN * (dN - 1.0))) * sums.w3_tilde;
  return out;
}

ViewIndependenceReport independence_report(const WeightRefs& weights, Index m, Index n) {
  check_weights(weights, m, n);
  const Index total = m + n;
  const auto views = static_cast<Index>(weights.size());
  const double dN = static_cast<double>(total);

  ViewIndependenceReport report;
  report.views = static_cast<int>(views);
  Eigen::MatrixXd hat_stack(total * total, views);
  Eigen::MatrixXd v_stack(total, views);
  for (Index s = 0; s < views; ++s) {
    const Eigen::MatrixXd& w = weights[s].get();
    const Eigen::VectorXd rows = w.rowwise().sum();
    const double w1 = rows.sum();
    const Eigen::VectorXd centered = rows.array() - w1 / dN;
    Eigen::MatrixXd hat(total, total);
    for (Index j = 0; j < total; ++j) {
      for (Index i = 0; i < total; ++i) {
        hat(i, j) = i == j ? 0.0
                           : w(i, j) - w1 / (dN * (dN - 1.0)) - (centered(i) + centered(j)) / (dN - 2.0);
      }
    }
    hat_stack.col(s) = Eigen::Map<const Eigen::VectorXd>(hat.data(), hat.size());
    v_stack.col(s) = centered;
    report.w_hat.push_back(std::move(hat));
    report.w_v.push_back(centered);
  }
  greedy_rank(hat_stack, report.rank_w, report.singular_views_w);
  greedy_rank(v_stack, report.rank_diff, report.singular_views_diff);
  return report;
}

bool is_positive_definite(const Eigen::MatrixXd& sym) {
  if (sym.rows() == 0) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return false;
  const auto& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  return top > 0.0 && ev.minCoeff() > 1e-10 * top;
}

namespace {

std::string singular_message(bool w_singular, bool diff_singular, const std::optional<ViewIndependenceReport>& report) {
  std::string msg = std::string("singular permutation covariance (") + (w_singular ? "Sigma_w" : "") +
                    (w_singular && diff_singular ? ", " : "") + (diff_singular ? "Sigma_diff" : "") +
                    "): views are linearly dependent or constant";
  if (!report) return msg;
  auto list = [](const std::vector<int>& views) {
    std::string out;
    for (int v : views) out += (out.empty() ? "" : ", ") + std::to_string(v);
    return out.empty() ? std::string("none") : out;
  };
  return msg + "; implicated views: " + list(report->singular_views_w) + " (centred weights), " +
         list(report->singular_views_diff) + " (centred degrees)";
}

}  // namespace

SingularCovariance::SingularCovariance(bool w_singular, bool diff_singular,
                                       std::optional<ViewIndependenceReport> report)
    : Degenerate(singular_message(w_singular, diff_singular, report)),
      w_singular_(w_singular),
      diff_singular_(diff_singular),
      report_(std::move(report)) {}

StatisticEvaluator::StatisticEvaluator(PermutationMoments moments) : moments_(std::move(moments)) {
  const bool w_ok = is_positive_definite(moments_.sigma_w);
  const bool diff_ok = is_positive_definite(moments_.sigma_diff);
  if (!w_ok || !diff_ok) throw SingularCovariance(!w_ok, !diff_ok);
  llt_w_.compute(moments_.sigma_w);
  llt_diff_.compute(moments_.sigma_diff);
  if (llt_w_.info() != Eigen::Success || llt_diff_.info() != Eigen::Success) {
    throw SingularCovariance(llt_w_.info() != Eigen::Success, llt_diff_.info() != Eigen::Success);
  }
}

Statistic StatisticEvaluator::operator()(const Eigen::VectorXd& u_x, const Eigen::VectorXd& u_y) const {
  const double dm = static_cast<double>(moments_.m);
  const double dn = static_cast<double>(moments_.n);
  const double nm2 = dm + dn - 2.0;
  Statistic out;
  out.v_w = ((dn - 1.0) * u_x + (dm - 1.0) * u_y) / nm2 - moments_.mu_w;
  out.v_diff = (u_x - u_y) - moments_.mu_diff;
  out.t_s = out.v_w.dot(llt_w_.solve(out.v_w)) + out.v_diff.dot(llt_diff_.solve(out.v_diff));
  out.t_prime.resize(static_cast<std::size_t>(u_x.size()));
  for (Index s = 0; s < u_x.size(); ++s) {
    const double zw = out.v_w(s) * out.v_w(s) / moments_.sigma_w(s, s);
    const double zd = out.v_diff(s) * out.v_diff(s) / moments_.sigma_diff(s, s);
    out.t_prime[static_cast<std::size_t>(s)] = zw + zd;
  }
  return out;
}

double StatisticEvaluator::t_s(const Eigen::VectorXd& u_x, const Eigen::VectorXd& u_y) const {
  const double dm = static_cast<double>(moments_.m);
  const double dn = static_cast<double>(moments_.n);
  const Eigen::VectorXd v_w = ((dn - 1.0) * u_x + (dm - 1.0) * u_y) / (dm + dn - 2.0) - moments_.mu_w;
  const Eigen::VectorXd v_diff = (u_x - u_y) - moments_.mu_diff;
  return v_w.dot(llt_w_.solve(v_w)) + v_diff.dot(llt_diff_.solve(v_diff));
}

Statistic statistic(const ViewSums& sums, const PermutationMoments& moments) {
  return StatisticEvaluator(moments)(sums.u_x, sums.u_y);
}

double statistic_full_form(const ViewSums& sums, const PermutationMoments& moments) {
  if (!is_positive_definite(moments.sigma_s)) throw SingularCovariance(true, true);
  const Index views = sums.views();
  Eigen::VectorXd v(2 * views);
  for (Index s = 0; s < views; ++s) {
    v(2 * s) = sums.u_x(s) - moments.mu_x(s);
    v(2 * s + 1) = sums.u_y(s) - moments.mu_y(s);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(moments.sigma_s);
  return v.dot(ldlt.solve(v));
}

Evaluation evaluate(const WeightRefs& weights, Index m, Index n) {
  ViewSums sums = view_sums(weights, m, n);
  PermutationMoments moments = permutation_moments(sums, m, n);
  try {
    Statistic stat = statistic(sums, moments);
    return {std::move(sums), std::move(moments), std::move(stat)};
  } catch (const SingularCovariance& e) {
    throw SingularCovariance(e.w_singular(), e.diff_singular(), independence_report(weights, m, n));
  }
}

}  // namespace mates
