#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mates/dissim.hpp"

namespace mates {

enum class GraphKind { knn, kmst };
enum class WeightScheme { binary, similarity, kernel, rank };

std::string_view to_string(GraphKind kind) noexcept;
std::string_view to_string(WeightScheme scheme) noexcept;
GraphKind parse_graph_kind(std::string_view text);
WeightScheme parse_weight_scheme(std::string_view text);

struct GraphSpec {
  GraphKind kind = GraphKind::knn;
  std::optional<int> k;             ///< nullopt: floor(N^0.8)
  WeightScheme weights = WeightScheme::kernel;
  std::optional<double> bandwidth;  ///< nullopt: median pairwise dissimilarity
};

/// floor(N^0.8) computed exactly in integers, clamped to N - 1.
int auto_k(Index n);
/// Resolves `spec.k` for N observations and checks the range for the graph kind.
/// For k-MST, auto is further clamped to floor((N - 1) / 2).
int resolve_k(const GraphSpec& spec, Index n);

struct Edge {
  Index i;
  Index j;
};

/// Graph over observations 0..N-1. For k-NN, `neighbors[i]` lists i's k nearest
/// neighbours nearest first (directed edges i -> j). For k-MST, it lists the
/// undirected neighbours of i in increasing index order and `trees` holds the
/// k edge-disjoint spanning trees in construction order.
struct Adjacency {
  GraphKind kind = GraphKind::knn;
  int k = 0;
  std::vector<std::vector<Index>> neighbors;
  std::vector<std::vector<Edge>> trees;

  Index size() const noexcept { return static_cast<Index>(neighbors.size()); }
  bool has_edge(Index i, Index j) const;
  /// Number of directed (k-NN) or undirected (k-MST) edges.
  std::size_t edge_count() const noexcept;
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> dense() const;
};

/// k nearest neighbours per row; ties broken by the smaller observation index.
Adjacency build_knn(const DissimilarityMatrix& d, int k);

/// Union of k successive minimum spanning trees, each avoiding the edges of the
/// earlier trees. Edge ties are broken by (i, j) in lexicographic order.
Adjacency build_kmst(const DissimilarityMatrix& d, int k);

/// Median of the N(N-1)/2 strictly upper-triangular entries.
double median_dissimilarity(const DissimilarityMatrix& d);

struct WeightedView {
  Adjacency adjacency;
  Eigen::MatrixXd weights;  ///< symmetrized, zero diagonal
  GraphSpec spec;           ///< with k and (for kernel weights) bandwidth resolved
  int view_index = 1;
};

/// Raw edge weights under `spec.weights`, then (W + W^T) / 2.
WeightedView attach_weights(const DissimilarityMatrix& d, Adjacency adjacency, const GraphSpec& spec);

/// Convenience: resolve k, build the graph and attach weights.
WeightedView build_view(const DissimilarityMatrix& d, const GraphSpec& spec);

}  // namespace mates
