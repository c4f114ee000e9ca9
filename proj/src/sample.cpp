#include "mates/sample.hpp"

#include <cmath>
#include <string>

#include "mates/error.hpp"

namespace mates {

SampleMatrix::SampleMatrix(RowMatrix values, Index m, Index n)
    : values_(std::move(values)), m_(m), n_(n) {
  if (m_ < 2 || n_ < 2) {
    throw InvalidArgument("each group needs at least 2 observations (m=" + std::to_string(m_) +
                          ", n=" + std::to_string(n_) + ")");
  }
  if (values_.rows() != m_ + n_) {
    throw InvalidArgument("sample has " + std::to_string(values_.rows()) + " rows but m + n = " +
                          std::to_string(m_ + n_));
  }
  if (values_.cols() < 1) throw InvalidArgument("sample needs at least one column");
  for (Index i = 0; i < values_.rows(); ++i) {
    for (Index r = 0; r < values_.cols(); ++r) {
      if (!std::isfinite(values_(i, r))) {
        throw DataError("non-finite value at row " + std::to_string(i + 1) + ", column " +
                        std::to_string(r + 1));
      }
    }
  }
}

SampleMatrix SampleMatrix::from_groups(const RowMatrix& x, const RowMatrix& y) {
  if (x.cols() != y.cols()) {
    throw InvalidArgument("X has " + std::to_string(x.cols()) + " columns, Y has " +
                          std::to_string(y.cols()));
  }
  RowMatrix pooled(x.rows() + y.rows(), x.cols());
  pooled.topRows(x.rows()) = x;
  pooled.bottomRows(y.rows()) = y;
  return SampleMatrix(std::move(pooled), x.rows(), y.rows());
}

}  // namespace mates
