#pragma once

#include <Eigen/Dense>

namespace mates {

using Index = Eigen::Index;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Pooled sample: the first m rows come from X, the remaining n rows from Y.
class SampleMatrix {
 public:
  SampleMatrix(RowMatrix values, Index m, Index n);

  static SampleMatrix from_groups(const RowMatrix& x, const RowMatrix& y);

  const RowMatrix& values() const noexcept { return values_; }
  const double* row(Index i) const noexcept { return values_.data() + i * values_.cols(); }
  Index m() const noexcept { return m_; }
  Index n() const noexcept { return n_; }
  Index size() const noexcept { return m_ + n_; }
  Index dim() const noexcept { return values_.cols(); }

 private:
  RowMatrix values_;
  Index m_;
  Index n_;
};

}  // namespace mates
