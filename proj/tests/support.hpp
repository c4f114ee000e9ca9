#pragma once

// Shared fixtures and brute-force oracles. Nothing here calls the closed-form
// moment code: the oracles enumerate labellings and sum weights directly.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "mates/graphs.hpp"
#include "mates/sample.hpp"

namespace testing {

using mates::Index;

inline mates::RowMatrix random_points(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> g;
  mates::RowMatrix z(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) z(i, j) = g(rng);
  }
  return z;
}

/// Dense random symmetric nonnegative weights with zero diagonal.
inline Eigen::MatrixXd random_weights(std::mt19937_64& rng, Index n, double density = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (u(rng) < density) w(i, j) = w(j, i) = u(rng);
    }
  }
  return w;
}

/// Calls f(in_x) for every m-subset of {0..N-1}, in_x[i] = 1 for members.
template <class F>
void for_each_labelling(Index total, Index m, F&& f) {
  std::vector<int> mask(static_cast<std::size_t>(total), 0);
  std::fill(mask.end() - m, mask.end(), 1);
  do {
    f(mask);
  } while (std::next_permutation(mask.begin(), mask.end()));
}

inline double within(const Eigen::MatrixXd& w, const std::vector<int>& mask, int group) {
  double s = 0.0;
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index j = 0; j < w.cols(); ++j) {
      if (mask[static_cast<std::size_t>(i)] == group && mask[static_cast<std::size_t>(j)] == group) s += w(i, j);
    }
  }
  return s;
}

struct Enumerated {
  Eigen::VectorXd mean;  ///< (U_x^1, U_y^1, ...) interleaved
  Eigen::MatrixXd cov;
  Eigen::MatrixXd cov_w_diff;  ///< Cov(U_w^s, U_diff^t)
  Eigen::MatrixXd cov_w, cov_diff;
  std::size_t count = 0;
};

/// Exact first and second moments of the within-group sums over all
/// C(N, m) labellings, by enumeration.
inline Enumerated enumerate_moments(const std::vector<Eigen::MatrixXd>& ws, Index m, Index n) {
  const Index total = m + n;
  const auto s_count = static_cast<Index>(ws.size());
  std::vector<Eigen::VectorXd> draws, wd;
  for_each_labelling(total, m, [&](const std::vector<int>& mask) {
    Eigen::VectorXd v(2 * s_count), u(2 * s_count);
    for (Index s = 0; s < s_count; ++s) {
      const double ux = within(ws[static_cast<std::size_t>(s)], mask, 1);
      const double uy = within(ws[static_cast<std::size_t>(s)], mask, 0);
      v(2 * s) = ux;
      v(2 * s + 1) = uy;
      u(s) = (static_cast<double>(n - 1) * ux + static_cast<double>(m - 1) * uy) / static_cast<double>(total - 2);
      u(s_count + s) = ux - uy;
    }
    draws.push_back(v);
    wd.push_back(u);
  });
  Enumerated out;
  out.count = draws.size();
  const double k = static_cast<double>(draws.size());
  out.mean = Eigen::VectorXd::Zero(2 * s_count);
  Eigen::VectorXd mean_u = Eigen::VectorXd::Zero(2 * s_count);
  for (std::size_t i = 0; i < draws.size(); ++i) {
    out.mean += draws[i] / k;
    mean_u += wd[i] / k;
  }
  out.cov = Eigen::MatrixXd::Zero(2 * s_count, 2 * s_count);
  Eigen::MatrixXd cu = Eigen::MatrixXd::Zero(2 * s_count, 2 * s_count);
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const Eigen::VectorXd d = draws[i] - out.mean;
    const Eigen::VectorXd e = wd[i] - mean_u;
    out.cov += d * d.transpose() / k;
    cu += e * e.transpose() / k;
  }
  out.cov_w = cu.topLeftCorner(s_count, s_count);
  out.cov_diff = cu.bottomRightCorner(s_count, s_count);
  out.cov_w_diff = cu.topRightCorner(s_count, s_count);
  return out;
}

/// Largest entrywise difference relative to the largest entry of `ref`.
inline double rel_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& ref) {
  const double scale = ref.cwiseAbs().maxCoeff();
  const double diff = (got - ref).cwiseAbs().maxCoeff();
  return scale > 0 ? diff / scale : diff;
}

struct Fixture {
  std::vector<mates::WeightedView> views;
  std::vector<Eigen::MatrixXd> weights;
  Index m = 0, n = 0;
};

/// Random small instance: N in [4, 8], S in [1, 3], mixed dissimilarities,
/// graphs and weight schemes.
Fixture random_fixture(std::mt19937_64& rng);

}  // namespace testing
