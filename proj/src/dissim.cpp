#include "mates/dissim.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "mates/error.hpp"
#include "mates/simd/kernels.hpp"

namespace mates {
namespace {

double integer_power(double x, int s) {
  double result = 1.0;
  double base = x;
  for (unsigned e = static_cast<unsigned>(s); e != 0; e >>= 1) {
    if (e & 1u) result *= base;
    if (e > 1) base *= base;
  }
  return result;
}

std::string describe(double s) {
  std::ostringstream os;
  os << s;
  return os.str();
}

template <typename PairFn>
Eigen::MatrixXd fill_symmetric(Index n, PairFn&& pair) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double v = pair(i, j);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

}  // namespace

DissimilarityMatrix::DissimilarityMatrix(Eigen::MatrixXd entries, int view_index)
    : entries_(std::move(entries)), view_index_(view_index) {
  if (entries_.rows() != entries_.cols()) {
    throw DataError("dissimilarity matrix must be square");
  }
  for (Index j = 0; j < entries_.cols(); ++j) {
    for (Index i = 0; i < entries_.rows(); ++i) {
      const double v = entries_(i, j);
      if (!std::isfinite(v)) {
        throw DataError("non-finite dissimilarity at (" + std::to_string(i + 1) + ", " +
                        std::to_string(j + 1) + ")");
      }
      if (v < 0.0) throw DataError("negative dissimilarity");
      if (i == j && v != 0.0) throw DataError("nonzero dissimilarity on the diagonal");
      if (v != entries_(j, i)) throw DataError("dissimilarity matrix is not symmetric");
    }
  }
}

DissimilarityMatrix moment_manhattan(const SampleMatrix& sample, int s) {
  return moment_manhattan(sample, s, s);
}

DissimilarityMatrix moment_manhattan(const SampleMatrix& sample, int s, int view_index) {
  if (s < 1) throw InvalidArgument("moment order must be >= 1");
  const Index n = sample.size();
  const Index d = sample.dim();
  RowMatrix powered(n, d);
  for (Index i = 0; i < n; ++i) {
    const double* src = sample.row(i);
    for (Index r = 0; r < d; ++r) {
      const double p = integer_power(src[r], s);
      if (!std::isfinite(p)) {
        throw DataError("overflow computing Z^s at row " + std::to_string(i + 1) + ", column " +
                        std::to_string(r + 1) + " (s = " + std::to_string(s) + ")");
      }
      powered(i, r) = p;
    }
  }
  const auto& k = simd::active();
  const auto len = static_cast<std::size_t>(d);
  Eigen::MatrixXd out = fill_symmetric(n, [&](Index i, Index j) {
    const double v = k.l1_distance(powered.data() + i * d, powered.data() + j * d, len);
    if (!std::isfinite(v)) {
      throw DataError("overflow in the moment distance between rows " + std::to_string(i + 1) + " and " +
                      std::to_string(j + 1) + " (s = " + std::to_string(s) + ")");
    }
    return v;
  });
  return DissimilarityMatrix(std::move(out), view_index);
}

DissimilarityMatrix lp_distance(const SampleMatrix& sample, double s, int view_index) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("l_s exponent must be positive");
  const Index n = sample.size();
  const Index d = sample.dim();
  const auto& k = simd::active();
  const auto len = static_cast<std::size_t>(d);

  auto overflow = [&](Index i, Index j) {
    for (Index r = 0; r < d; ++r) {
      if (!std::isfinite(std::pow(std::fabs(sample.row(i)[r] - sample.row(j)[r]), s))) {
        return DataError("overflow in the l_s distance: rows " + std::to_string(i + 1) + " and " +
                         std::to_string(j + 1) + ", column " + std::to_string(r + 1) + " (s = " + describe(s) + ")");
      }
    }
    return DataError("overflow in the l_s distance between rows " + std::to_string(i + 1) + " and " +
                     std::to_string(j + 1) + " (s = " + describe(s) + ")");
  };

  Eigen::MatrixXd out = fill_symmetric(n, [&](Index i, Index j) {
    const double* a = sample.row(i);
    const double* b = sample.row(j);
    double v;
    if (s == 1.0) {
      v = k.l1_distance(a, b, len);
    } else if (s == 2.0) {
      v = std::sqrt(k.sq_l2_distance(a, b, len));
    } else {
      double acc = 0.0;
      for (Index r = 0; r < d; ++r) acc += std::pow(std::fabs(a[r] - b[r]), s);
      v = std::pow(acc, 1.0 / s);
    }
    if (!std::isfinite(v)) throw overflow(i, j);
    return v;
  });
  return DissimilarityMatrix(std::move(out), view_index);
}

DissimilarityMatrix precomputed(const Eigen::MatrixXd& matrix, int view_index) {
  if (matrix.rows() != matrix.cols()) {
    throw DataError("precomputed dissimilarity must be square, got " +
                          std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()));
  }
  if (!matrix.allFinite()) throw DataError("precomputed dissimilarity has non-finite entries");
  if ((matrix.array() < 0.0).any()) throw DataError("negative dissimilarity");
  const double tol = 1e-9 * (matrix.size() ? matrix.maxCoeff() : 0.0);
  const Index n = matrix.rows();
  for (Index j = 0; j < n; ++j) {
    if (std::fabs(matrix(j, j)) > tol) throw DataError("nonzero dissimilarity on the diagonal");
    for (Index i = 0; i < j; ++i) {
      if (std::fabs(matrix(i, j) - matrix(j, i)) > tol) {
        throw DataError("asymmetric dissimilarity at (" + std::to_string(i + 1) + ", " +
                        std::to_string(j + 1) + ")");
      }
    }
  }
  Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  sym.diagonal().setZero();
  return DissimilarityMatrix(std::move(sym), view_index);
}

DissimilarityMatrix precomputed(const Eigen::MatrixXd& matrix, int view_index, Index expected_n) {
  if (matrix.rows() != expected_n || matrix.cols() != expected_n) {
    throw DataError("precomputed dissimilarity is " + std::to_string(matrix.rows()) + "x" +
                          std::to_string(matrix.cols()) + " but the sample has " +
                          std::to_string(expected_n) + " observations");
  }
  return precomputed(matrix, view_index);
}

}  // namespace mates
