#include "mates/samplers.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "mates/error.hpp"

namespace mates::samplers {

double normal(Rng& rng, double mean, double sd) {
  std::normal_distribution<double> dist(mean, sd);
  return dist(rng);
}

double student_t(Rng& rng, double df) {
  std::student_t_distribution<double> dist(df);
  return dist(rng);
}

double symmetric_mixture(Rng& rng, double mu) {
  std::bernoulli_distribution coin(0.5);
  const double centre = coin(rng) ? mu : -mu;
  return centre + normal(rng);
}

double generalized_normal(Rng& rng, double alpha, double beta) {
  std::bernoulli_distribution coin(0.5);
  const double sign = coin(rng) ? 1.0 : -1.0;
  std::gamma_distribution<double> g(1.0 / beta, 1.0);
  return sign * alpha * std::pow(g(rng), 1.0 / beta);
}

double gamma(Rng& rng, double shape, double scale) {
  std::gamma_distribution<double> dist(shape, scale);
  return dist(rng);
}

double lognormal(Rng& rng, double meanlog, double sigma) {
  std::lognormal_distribution<double> dist(meanlog, sigma);
  return dist(rng);
}

double t_variance(double df) {
  if (!(df > 2.0)) throw InvalidArgument("t variance needs df > 2");
  return df / (df - 2.0);
}

double generalized_normal_variance(double alpha, double beta) {
  return alpha * alpha * std::exp(std::lgamma(3.0 / beta) - std::lgamma(1.0 / beta));
}

double lognormal_mean(double meanlog, double sigma) { return std::exp(meanlog + 0.5 * sigma * sigma); }

double lognormal_variance(double meanlog, double sigma) {
  const double s2 = sigma * sigma;
  return std::expm1(s2) * std::exp(2.0 * meanlog + s2);
}

GammaParams gamma_matching(double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0)) throw InvalidArgument("gamma matching needs positive moments");
  return {mean * mean / variance, variance / mean};
}

const Eigen::MatrixXd& ar_correlation_sqrt(Eigen::Index d, double rho) {
  static std::mutex mutex;
  static std::map<std::pair<Eigen::Index, double>, std::unique_ptr<Eigen::MatrixXd>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{d, rho}];
  if (!slot) {
    Eigen::MatrixXd sigma(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) sigma(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
      throw InvalidArgument("correlation matrix is not positive definite");
    }
    slot = std::make_unique<Eigen::MatrixXd>(eig.operatorSqrt());
  }
  return *slot;
}

}  // namespace mates::samplers
