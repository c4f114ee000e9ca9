#pragma once

#include <Eigen/Dense>

#include "mates/sample.hpp"

namespace mates {

/// Symmetric, zero-diagonal, nonnegative N x N matrix for one view.
class DissimilarityMatrix {
 public:
  /// Validates the invariants exactly (no tolerance); use `precomputed` for
  /// user data that may be slightly asymmetric.
  DissimilarityMatrix(Eigen::MatrixXd entries, int view_index);

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double operator()(Index i, Index j) const noexcept { return entries_(i, j); }
  Index size() const noexcept { return entries_.rows(); }
  int view_index() const noexcept { return view_index_; }
  /// Largest entry (M in the similarity weight scheme).
  double max() const noexcept { return entries_.maxCoeff(); }

 private:
  Eigen::MatrixXd entries_;
  int view_index_;
};

/// D_ij = sum_r |Z_ir^s - Z_jr^s|. Throws DataError when a power overflows.
DissimilarityMatrix moment_manhattan(const SampleMatrix& sample, int s);
DissimilarityMatrix moment_manhattan(const SampleMatrix& sample, int s, int view_index);

/// D_ij = (sum_r |Z_ir - Z_jr|^s)^(1/s), s > 0.
DissimilarityMatrix lp_distance(const SampleMatrix& sample, double s, int view_index = 1);

/// Accepts a user matrix that is symmetric to within 1e-9 of its largest
/// entry, nonnegative and zero on the diagonal; stores (M + M^T) / 2.
DissimilarityMatrix precomputed(const Eigen::MatrixXd& matrix, int view_index);
/// As above, also checking the size against the sample.
DissimilarityMatrix precomputed(const Eigen::MatrixXd& matrix, int view_index, Index expected_n);

}  // namespace mates
