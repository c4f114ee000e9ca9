#pragma once

#include <Eigen/Dense>
#include <random>

namespace mates::samplers {

using Rng = std::mt19937_64;

double normal(Rng& rng, double mean = 0.0, double sd = 1.0);
double student_t(Rng& rng, double df);
/// Equal-weight mixture of N(mu, 1) and N(-mu, 1).
double symmetric_mixture(Rng& rng, double mu);
/// Density beta / (2 alpha Gamma(1/beta)) exp(-(|x| / alpha)^beta), drawn as
/// sign * alpha * G^(1/beta) with G ~ Gamma(1/beta, 1).
double generalized_normal(Rng& rng, double alpha, double beta);
double gamma(Rng& rng, double shape, double scale);
double lognormal(Rng& rng, double meanlog, double sigma);

double t_variance(double df);
double generalized_normal_variance(double alpha, double beta);
double lognormal_mean(double meanlog, double sigma);
double lognormal_variance(double meanlog, double sigma);

struct GammaParams {
  double shape;
  double scale;
};
/// Gamma law with the given mean and variance.
GammaParams gamma_matching(double mean, double variance);

/// Symmetric square root of Sigma_ij = rho^|i-j|, cached per (d, rho).
const Eigen::MatrixXd& ar_correlation_sqrt(Eigen::Index d, double rho);

}  // namespace mates::samplers
