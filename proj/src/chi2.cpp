#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mates/error.hpp"
#include "mates/inference.hpp"

namespace mates {
namespace {

constexpr double kEps = 1e-17;
constexpr int kMaxIter = 100000;

// Lower regularized P(a, x) by its power series; used for x < a + 1.
double series_p(double a, double x) {
  double term = 1.0 / a;
  double total = term;
  double ap = a;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    total += term;
    if (std::fabs(term) < std::fabs(total) * kEps) break;
  }
  return total * std::exp(a * std::log(x) - x - std::lgamma(a));
}

// Upper regularized Q(a, x) by its continued fraction (modified Lentz); x >= a + 1.
double continued_fraction_q(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(a * std::log(x) - x - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("gamma_q needs a > 0");
  if (!(x >= 0.0)) throw InvalidArgument("gamma_q needs x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - series_p(a, x);
  return continued_fraction_q(a, x);
}

double p_value_chi2(double t, int dof) {
  if (dof <= 0) throw InvalidArgument("chi-square degrees of freedom must be positive");
  if (!(t >= 0.0)) throw InvalidArgument("chi-square statistic must be >= 0, got " + std::to_string(t));
  const double q = gamma_q(0.5 * dof, 0.5 * t);
  return std::clamp(q, 0.0, 1.0);
}

}  // namespace mates
