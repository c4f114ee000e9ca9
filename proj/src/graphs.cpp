#include "mates/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mates/error.hpp"

namespace mates {
namespace {

struct DisjointSets {
  explicit DisjointSets(Index n) : parent(static_cast<std::size_t>(n)), rank(parent.size(), 0) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
    return true;
  }
  std::vector<Index> parent;
  std::vector<int> rank;
};

// 64-bit integer power with saturation; enough for the k^5 <= N^4 comparison.
unsigned __int128 ipow(std::uint64_t base, int e) {
  unsigned __int128 r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

std::string_view to_string(GraphKind kind) noexcept {
  return kind == GraphKind::knn ? "knn" : "kmst";
}

std::string_view to_string(WeightScheme scheme) noexcept {
  switch (scheme) {
    case WeightScheme::binary:
      return "binary";
    case WeightScheme::similarity:
      return "similarity";
    case WeightScheme::kernel:
      return "kernel";
    case WeightScheme::rank:
      return "rank";
  }
  return "unknown";
}

GraphKind parse_graph_kind(std::string_view text) {
  if (text == "knn") return GraphKind::knn;
  if (text == "kmst") return GraphKind::kmst;
  throw InvalidArgument("unknown graph kind '" + std::string(text) + "' (expected knn|kmst)");
}

WeightScheme parse_weight_scheme(std::string_view text) {
  for (auto s : {WeightScheme::binary, WeightScheme::similarity, WeightScheme::kernel,
                 WeightScheme::rank}) {
    if (text == to_string(s)) return s;
  }
  throw InvalidArgument("unknown weight scheme '" + std::string(text) +
                        "' (expected binary|similarity|kernel|rank)");
}

int auto_k(Index n) {
  if (n < 2) throw InvalidArgument("need at least two observations");
  // Largest k with k^5 <= N^4, i.e. floor(N^0.8) without rounding trouble at exact powers.
  const auto big_n = static_cast<std::uint64_t>(n);
  const unsigned __int128 target = ipow(big_n, 4);
  auto k = static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(n), 0.8)));
  while (k > 0 && ipow(k, 5) > target) --k;
  while (ipow(k + 1, 5) <= target) ++k;
  return static_cast<int>(std::min<std::uint64_t>(std::max<std::uint64_t>(k, 1), big_n - 1));
}

int resolve_k(const GraphSpec& spec, Index n) {
  if (spec.kind == GraphKind::knn) {
    const int k = spec.k ? *spec.k : auto_k(n);
    if (k < 1 || k > n - 1) {
      throw InvalidArgument("k-NN needs 1 <= k <= N-1 (k=" + std::to_string(k) +
                            ", N=" + std::to_string(n) + ")");
    }
    return k;
  }
  const int max_k = static_cast<int>((n - 1) / 2);
  const int k = spec.k ? *spec.k : std::min(auto_k(n), max_k);
  if (k < 1 || k > max_k) {
    throw InvalidArgument("k-MST needs 1 <= k <= floor((N-1)/2) (k=" + std::to_string(k) +
                          ", N=" + std::to_string(n) + ")");
  }
  return k;
}

bool Adjacency::has_edge(Index i, Index j) const {
  const auto& row = neighbors.at(static_cast<std::size_t>(i));
  if (kind == GraphKind::kmst) return std::binary_search(row.begin(), row.end(), j);
  return std::find(row.begin(), row.end(), j) != row.end();
}

std::size_t Adjacency::edge_count() const noexcept {
  std::size_t total = 0;
  for (const auto& row : neighbors) total += row.size();
  return kind == GraphKind::kmst ? total / 2 : total;
}

Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> Adjacency::dense() const {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> g =
      Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(size(), size());
  for (Index i = 0; i < size(); ++i) {
    for (Index j : neighbors[i]) g(i, j) = 1;
  }
  return g;
}

Adjacency build_knn(const DissimilarityMatrix& d, int k) {
  const Index n = d.size();
  if (k < 1 || k > n - 1) {
    throw InvalidArgument("k-NN needs 1 <= k <= N-1 (k=" + std::to_string(k) +
                          ", N=" + std::to_string(n) + ")");
  }
  Adjacency adj;
  adj.kind = GraphKind::knn;
  adj.k = k;
  adj.neighbors.resize(static_cast<std::size_t>(n));
  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    order.clear();
    for (Index j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    auto closer = [&](Index a, Index b) {
      const double da = d(i, a), db = d(i, b);
      return da < db || (da == db && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), closer);
    adj.neighbors[i].assign(order.begin(), order.begin() + k);
  }
  return adj;
}

Adjacency build_kmst(const DissimilarityMatrix& d, int k) {
  const Index n = d.size();
  const int max_k = static_cast<int>((n - 1) / 2);
  if (k < 1 || k > max_k) {
    throw InvalidArgument("k-MST needs 1 <= k <= floor((N-1)/2) (k=" + std::to_string(k) +
                          ", N=" + std::to_string(n) + ")");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) edges.push_back({i, j});
  }
  std::sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
    const double da = d(a.i, a.j), db = d(b.i, b.j);
    if (da != db) return da < db;
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });

  Adjacency adj;
  adj.kind = GraphKind::kmst;
  adj.k = k;
  adj.neighbors.resize(static_cast<std::size_t>(n));
  std::vector<char> used(edges.size(), 0);
  for (int t = 0; t < k; ++t) {
    DisjointSets sets(n);
    std::vector<Edge> tree;
    tree.reserve(static_cast<std::size_t>(n - 1));
    for (std::size_t e = 0; e < edges.size() && static_cast<Index>(tree.size()) < n - 1; ++e) {
      if (used[e]) continue;
      if (sets.unite(edges[e].i, edges[e].j)) {
        used[e] = 1;
        tree.push_back(edges[e]);
      }
    }
    if (static_cast<Index>(tree.size()) != n - 1) {
      throw Degenerate("k-MST: the graph left after " + std::to_string(t) +
                       " spanning trees is disconnected; use a smaller k");
    }
    for (const Edge& e : tree) {
      adj.neighbors[e.i].push_back(e.j);
      adj.neighbors[e.j].push_back(e.i);
    }
    adj.trees.push_back(std::move(tree));
  }
  for (auto& row : adj.neighbors) std::sort(row.begin(), row.end());
  return adj;
}

double median_dissimilarity(const DissimilarityMatrix& d) {
  const Index n = d.size();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) values.push_back(d(i, j));
  }
  if (values.empty()) throw InvalidArgument("median needs at least two observations");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

WeightedView attach_weights(const DissimilarityMatrix& d, Adjacency adjacency, const GraphSpec& spec) {
  const Index n = d.size();
  if (adjacency.size() != n) {
    throw InvalidArgument("adjacency and dissimilarity sizes differ");
  }
  GraphSpec resolved = spec;
  resolved.kind = adjacency.kind;
  resolved.k = adjacency.k;

  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(n, n);
  switch (spec.weights) {
    case WeightScheme::binary:
      for (Index i = 0; i < n; ++i) {
        for (Index j : adjacency.neighbors[i]) raw(i, j) = 1.0;
      }
      break;
    case WeightScheme::similarity: {
      const double top = d.max();
      for (Index i = 0; i < n; ++i) {
        for (Index j : adjacency.neighbors[i]) raw(i, j) = top - d(i, j);
      }
      break;
    }
    case WeightScheme::kernel: {
      if (spec.bandwidth && !(*spec.bandwidth > 0.0 && std::isfinite(*spec.bandwidth))) {
        throw InvalidArgument("kernel bandwidth must be positive and finite");
      }
      const double sigma = spec.bandwidth ? *spec.bandwidth : median_dissimilarity(d);
      if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Degenerate("kernel bandwidth is zero (all pairwise dissimilarities at the median are 0)");
      }
      resolved.bandwidth = sigma;
      for (Index i = 0; i < n; ++i) {
        for (Index j : adjacency.neighbors[i]) raw(i, j) = std::exp(-d(i, j) / sigma);
      }
      break;
    }
    case WeightScheme::rank: {
      if (adjacency.kind != GraphKind::knn) {
        throw InvalidArgument("rank weights require a k-NN graph");
      }
      const int k = adjacency.k;
      for (Index i = 0; i < n; ++i) {
        const auto& row = adjacency.neighbors[i];
        for (std::size_t l = 0; l < row.size(); ++l) {
          raw(i, row[l]) = static_cast<double>(k - static_cast<int>(l));
        }
      }
      break;
    }
  }

  WeightedView view;
  view.weights = 0.5 * (raw + raw.transpose());
  view.adjacency = std::move(adjacency);
  view.spec = resolved;
  view.view_index = d.view_index();
  return view;
}

WeightedView build_view(const DissimilarityMatrix& d, const GraphSpec& spec) {
  const int k = resolve_k(spec, d.size());
  Adjacency adj = spec.kind == GraphKind::knn ? build_knn(d, k) : build_kmst(d, k);
  return attach_weights(d, std::move(adj), spec);
}

}  // namespace mates
