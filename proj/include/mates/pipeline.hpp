#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mates/graphs.hpp"
#include "mates/sample.hpp"

namespace mates {

enum class DissimilarityKind { moment, lp, precomputed };

/// One view: how to measure dissimilarity and how to turn it into a graph.
struct ViewSpec {
  DissimilarityKind kind = DissimilarityKind::moment;
  double order = 1.0;  ///< moment order s, or the exponent of the l_s distance
  GraphSpec graph;
  std::shared_ptr<const Eigen::MatrixXd> matrix;  ///< precomputed views only
  std::string source;                             ///< file name for precomputed views

  std::string describe() const;
};

/// Moment-Manhattan views s = 1..4 on a k-NN graph, k = floor(N^0.8), kernel
/// weights with the median bandwidth.
std::vector<ViewSpec> default_views(int moments = 4);

/// Builds D, G and W for every view over the pooled sample.
std::vector<WeightedView> build_views(const SampleMatrix& sample, std::span<const ViewSpec> specs);

}  // namespace mates
