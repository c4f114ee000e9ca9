#include <Eigen/Eigenvalues>
#include <random>

#include "doctest.h"
#include "mates/core.hpp"
#include "mates/dissim.hpp"
#include "support.hpp"

using namespace mates;
using testing::rel_error;

namespace {

// N = 4, m = n = 2: W01 = 1, W12 = 0.5, W23 = 0.5.
Eigen::MatrixXd tiny() {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  w(0, 1) = w(1, 0) = 1.0;
  w(1, 2) = w(2, 1) = 0.5;
  w(2, 3) = w(3, 2) = 0.5;
  return w;
}

Eigen::MatrixXd complete(Index n) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(n, n);
  w.diagonal().setZero();
  return w;
}

double min_eig_ratio(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  return top > 0 ? es.eigenvalues().minCoeff() / top : 0.0;
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("sums on the tiny graph") {
    const std::vector<Eigen::MatrixXd> ws{tiny()};
    const auto s = view_sums(weight_refs(ws), 2, 2);
    CHECK(s.u_x(0) == 2.0);
    CHECK(s.u_y(0) == 1.0);
    CHECK(s.w1(0) == 4.0);
    CHECK(s.w2(0, 0) == 3.0);
    CHECK(s.w3(0, 0) == 4.5);
    CHECK(s.w2_tilde(0, 0) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(s.w3_tilde(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.u_w(0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(s.u_diff(0) == 1.0);

    const auto mo = permutation_moments(s, 2, 2);
    CHECK(mo.mu_x(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(mo.mu_y(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(mo.c == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(mo.sigma_s(0, 0) == doctest::Approx(5.0 / 9.0).epsilon(1e-14));

    const auto e = testing::enumerate_moments(ws, 2, 2);
    CHECK(e.count == 6);
    CHECK(rel_error(mo.sigma_s, e.cov) < 1e-12);
    CHECK(rel_error(Eigen::Vector2d(mo.mu_x(0), mo.mu_y(0)), e.mean) < 1e-12);
  }

  TEST_CASE("complete graph is degenerate, zero weights give zero sums") {
    for (Index m : {2, 3, 5}) {
      const Index n = 7 - m;
      const std::vector<Eigen::MatrixXd> ws{complete(7)};
      const auto s = view_sums(weight_refs(ws), m, n);
      CHECK(s.u_x(0) == static_cast<double>(m * (m - 1)));
      CHECK(s.u_y(0) == static_cast<double>(n * (n - 1)));
      CHECK(s.w2_tilde(0, 0) == 0.0);
      CHECK(s.w3_tilde(0, 0) == 0.0);
      const auto mo = permutation_moments(s, m, n);
      CHECK(mo.sigma_s.isZero(0.0));
      const auto rep = independence_report(weight_refs(ws), m, n);
      CHECK(rep.rank_w == 0);
      CHECK(rep.rank_diff == 0);
      CHECK(rep.w_hat[0].isZero(1e-15));
      CHECK(rep.w_v[0].isZero(1e-15));
    }
    const std::vector<Eigen::MatrixXd> zero{Eigen::MatrixXd::Zero(5, 5)};
    const auto s = view_sums(weight_refs(zero), 2, 3);
    CHECK(s.u_x(0) == 0.0);
    CHECK(s.u_y(0) == 0.0);
    CHECK(s.w1(0) == 0.0);
    CHECK(s.w2.isZero(0.0));
    CHECK(s.w3.isZero(0.0));
  }

  TEST_CASE("W3 equals the literal triple sum") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 10; ++t) {
      const std::vector<Eigen::MatrixXd> ws{testing::random_weights(rng, 5), testing::random_weights(rng, 5, 0.6)};
      const auto s = view_sums(weight_refs(ws), 2, 3);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          double triple = 0.0, pair = 0.0;
          for (Index i = 0; i < 5; ++i)
            for (Index j = 0; j < 5; ++j) {
              pair += ws[a](i, j) * ws[b](i, j);
              for (Index l = 0; l < 5; ++l) triple += ws[a](i, j) * ws[b](i, l);
            }
          CHECK(s.w3(a, b) == doctest::Approx(triple).epsilon(1e-13));
          CHECK(s.w2(a, b) == doctest::Approx(pair).epsilon(1e-13));
        }
        CHECK(s.w3_tilde(a, a) == doctest::Approx(s.centered_row_sums[a].squaredNorm()).epsilon(1e-13));
        CHECK(s.w3_tilde(a, a) >= 0.0);
      }
      CHECK(s.w2 == s.w2.transpose());
      CHECK(s.w3 == s.w3.transpose());
    }
  }

  TEST_CASE("exact moments and orthogonality against enumeration") {
    std::mt19937_64 rng(22);
    int both_forms = 0;
    for (int t = 0; t < 40; ++t) {
      const auto f = testing::random_fixture(rng);
      CAPTURE(f.m);
      CAPTURE(f.n);
      CAPTURE(f.weights.size());
      const auto s = view_sums(weight_refs(f.weights), f.m, f.n);
      const auto mo = permutation_moments(s, f.m, f.n);
      const auto e = testing::enumerate_moments(f.weights, f.m, f.n);
      const auto views = static_cast<Index>(f.weights.size());
      Eigen::VectorXd mean(2 * views);
      for (Index v = 0; v < views; ++v) {
        mean(2 * v) = mo.mu_x(v);
        mean(2 * v + 1) = mo.mu_y(v);
      }
      CHECK(rel_error(mean, e.mean) <= 1e-10);
      CHECK(rel_error(mo.sigma_s, e.cov) <= 1e-10);
      CHECK(rel_error(mo.sigma_w, e.cov_w) <= 1e-10);
      CHECK(rel_error(mo.sigma_diff, e.cov_diff) <= 1e-10);
      const double scale = std::max(e.cov_w.cwiseAbs().maxCoeff(), e.cov_diff.cwiseAbs().maxCoeff());
      CHECK(e.cov_w_diff.cwiseAbs().maxCoeff() <= 1e-10 * scale);

      for (const auto* m : {&mo.sigma_s, &mo.sigma_w, &mo.sigma_diff}) {
        CHECK(*m == m->transpose());
        CHECK(min_eig_ratio(*m) >= -1e-9);
      }
      if (is_positive_definite(mo.sigma_w) && is_positive_definite(mo.sigma_diff) &&
          is_positive_definite(mo.sigma_s)) {
        const auto st = statistic(s, mo);
        const double full = statistic_full_form(s, mo);
        CHECK(st.t_s == doctest::Approx(full).epsilon(1e-8));
        CHECK(st.t_s >= 0.0);
        ++both_forms;
      }
    }
    CHECK(both_forms >= 10);
  }

  TEST_CASE("homogeneity under scaling one view") {
    std::mt19937_64 rng(23);
    std::vector<Eigen::MatrixXd> ws{testing::random_weights(rng, 7), testing::random_weights(rng, 7)};
    const auto a = permutation_moments(view_sums(weight_refs(ws), 3, 4), 3, 4);
    ws[1] *= 2.5;
    const auto b = permutation_moments(view_sums(weight_refs(ws), 3, 4), 3, 4);
    CHECK(b.mu_x(1) == doctest::Approx(2.5 * a.mu_x(1)).epsilon(1e-14));
    CHECK(b.mu_x(0) == a.mu_x(0));
    CHECK(b.sigma_s(2, 2) == doctest::Approx(6.25 * a.sigma_s(2, 2)).epsilon(1e-13));
    CHECK(b.sigma_s(0, 3) == doctest::Approx(2.5 * a.sigma_s(0, 3)).epsilon(1e-13));
    CHECK(b.sigma_s(0, 0) == doctest::Approx(a.sigma_s(0, 0)).epsilon(1e-15));
  }

  TEST_CASE("statistic special cases") {
    std::mt19937_64 rng(24);
    const std::vector<Eigen::MatrixXd> ws{testing::random_weights(rng, 8)};
    const auto s = view_sums(weight_refs(ws), 3, 5);
    const auto mo = permutation_moments(s, 3, 5);
    const StatisticEvaluator ev(mo);
    CHECK(ev.t_s(mo.mu_x, mo.mu_y) == doctest::Approx(0.0).epsilon(1e-20));

    const auto st = statistic(s, mo);
    const double zw = (s.u_w(0) - mo.mu_w(0)) / std::sqrt(mo.sigma_w(0, 0));
    const double zd = (s.u_diff(0) - mo.mu_diff(0)) / std::sqrt(mo.sigma_diff(0, 0));
    CHECK(st.t_s == doctest::Approx(zw * zw + zd * zd).epsilon(1e-12));
    REQUIRE(st.t_prime.size() == 1);
    CHECK(st.t_prime[0] == doctest::Approx(st.t_s).epsilon(1e-10));

    // The tiny graph: decomposition against the full form.
    const std::vector<Eigen::MatrixXd> tw{tiny()};
    const auto ts = view_sums(weight_refs(tw), 2, 2);
    const auto tm = permutation_moments(ts, 2, 2);
    CHECK(statistic(ts, tm).t_s == doctest::Approx(statistic_full_form(ts, tm)).epsilon(1e-8));
  }

  TEST_CASE("single-view statistics use the per-view 2x2 block") {
    std::mt19937_64 rng(25);
    const std::vector<Eigen::MatrixXd> ws{testing::random_weights(rng, 9), testing::random_weights(rng, 9)};
    const auto s = view_sums(weight_refs(ws), 4, 5);
    const auto mo = permutation_moments(s, 4, 5);
    const auto st = statistic(s, mo);
    for (Index v = 0; v < 2; ++v) {
      const Eigen::Matrix2d block = mo.sigma_s.block(2 * v, 2 * v, 2, 2);
      const Eigen::Vector2d u(s.u_x(v) - mo.mu_x(v), s.u_y(v) - mo.mu_y(v));
      CHECK(st.t_prime[static_cast<std::size_t>(v)] == doctest::Approx(u.dot(block.inverse() * u)).epsilon(1e-9));
    }
  }

  TEST_CASE("swapping the groups leaves T_S unchanged") {
    std::mt19937_64 rng(26);
    for (int t = 0; t < 10; ++t) {
      const Index m = 3 + t % 3, n = 6;
      const Index total = m + n;
      std::vector<Eigen::MatrixXd> ws{testing::random_weights(rng, total), testing::random_weights(rng, total, 0.5)};
      // New order: old Y rows first, then old X rows.
      Eigen::PermutationMatrix<Eigen::Dynamic> p(total);
      for (Index i = 0; i < total; ++i) p.indices()(i) = static_cast<int>(i < m ? i + n : i - m);
      std::vector<Eigen::MatrixXd> swapped;
      for (const auto& w : ws) swapped.push_back(p * w * p.transpose());
      const auto a = evaluate(weight_refs(ws), m, n);
      const auto b = evaluate(weight_refs(swapped), n, m);
      CHECK(b.sums.u_x(0) == doctest::Approx(a.sums.u_y(0)).epsilon(1e-13));
      CHECK(b.statistic.t_s == doctest::Approx(a.statistic.t_s).epsilon(1e-10));
    }
  }

  TEST_CASE("independence report and singular covariance") {
    std::mt19937_64 rng(27);
    const Eigen::MatrixXd w = testing::random_weights(rng, 8);
    const Eigen::MatrixXd u = testing::random_weights(rng, 8);

    const std::vector<Eigen::MatrixXd> dup{w, w};
    auto rep = independence_report(weight_refs(dup), 4, 4);
    CHECK(rep.rank_w == 1);
    CHECK(rep.rank_diff == 1);
    CHECK(rep.singular_views_w == std::vector<int>{2});
    CHECK(rep.singular_views_diff == std::vector<int>{2});
    CHECK_FALSE(rep.full_rank());

    const std::vector<Eigen::MatrixXd> scaled{w, 2.0 * w};
    rep = independence_report(weight_refs(scaled), 4, 4);
    CHECK(rep.rank_w == 1);
    CHECK(rep.rank_diff == 1);

    const std::vector<Eigen::MatrixXd> combo{w, u, 0.5 * w + 2.0 * u};
    rep = independence_report(weight_refs(combo), 4, 4);
    CHECK(rep.rank_w == 2);
    CHECK(rep.singular_views_w == std::vector<int>{3});

    try {
      evaluate(weight_refs(dup), 4, 4);
      FAIL("expected SingularCovariance");
    } catch (const SingularCovariance& e) {
      CHECK(e.w_singular());
      CHECK(e.diff_singular());
      REQUIRE(e.report());
      CHECK(e.report()->singular_views_w == std::vector<int>{2});
    }

    const std::vector<Eigen::MatrixXd> ok{w, u};
    rep = independence_report(weight_refs(ok), 4, 4);
    CHECK(rep.full_rank());
    CHECK_NOTHROW(evaluate(weight_refs(ok), 4, 4));

    // Brute-force construction of one centred matrix.
    const auto s = view_sums(weight_refs(ok), 4, 4);
    const double w1 = s.w1(0);
    for (Index i = 0; i < 8; ++i)
      for (Index j = 0; j < 8; ++j) {
        const double expect = i == j ? 0.0
                                     : w(i, j) - w1 / 56.0 -
                                           (s.centered_row_sums[0](i) + s.centered_row_sums[0](j)) / 6.0;
        CHECK(rep.w_hat[0](i, j) == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
      }
  }

  TEST_CASE("positive definiteness agrees with the rank check") {
    std::mt19937_64 rng(28);
    std::uniform_int_distribution<int> kind(0, 3);
    for (int t = 0; t < 60; ++t) {
      auto f = testing::random_fixture(rng);
      switch (kind(rng)) {
        case 0: f.weights.push_back(f.weights.front()); break;
        case 1: f.weights.push_back(3.0 * f.weights.front()); break;
        case 2: {
          Eigen::MatrixXd c = complete(f.m + f.n);
          f.weights.push_back(c);
          break;
        }
        default: break;
      }
      const auto s = view_sums(weight_refs(f.weights), f.m, f.n);
      const auto mo = permutation_moments(s, f.m, f.n);
      const auto rep = independence_report(weight_refs(f.weights), f.m, f.n);
      const int views = static_cast<int>(f.weights.size());
      CHECK(rep.rank_w <= views);
      CHECK(rep.rank_diff <= views);
      CHECK(is_positive_definite(mo.sigma_w) == (rep.rank_w == views));
      CHECK(is_positive_definite(mo.sigma_diff) == (rep.rank_diff == views));
    }
  }

  TEST_CASE("argument checks") {
    const std::vector<Eigen::MatrixXd> ws{Eigen::MatrixXd::Zero(4, 4), Eigen::MatrixXd::Zero(5, 5)};
    CHECK_THROWS_AS(view_sums(weight_refs(ws), 2, 2), InvalidArgument);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    a(0, 1) = 1.0;
    const std::vector<Eigen::MatrixXd> asym{a};
    CHECK_THROWS_AS(view_sums(weight_refs(asym), 2, 2), InvalidArgument);
    const std::vector<Eigen::MatrixXd> three{Eigen::MatrixXd::Zero(3, 3)};
    const auto s = view_sums(weight_refs(three), 1, 2);
    CHECK_THROWS_AS(permutation_moments(s, 1, 2), InvalidArgument);
  }
}
