#include "support.hpp"

#include "mates/dissim.hpp"
#include "mates/error.hpp"

namespace testing {

Fixture random_fixture(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick_n(4, 8), pick_s(1, 3), coin(0, 1), pick_scheme(0, 3), pick_order(1, 4);
  Fixture f;
  const Index total = pick_n(rng);
  f.m = std::uniform_int_distribution<Index>(2, total - 2)(rng);
  f.n = total - f.m;
  const auto sample = mates::SampleMatrix(random_points(rng, total, 3), f.m, f.n);
  const int s_count = pick_s(rng);
  for (int s = 1; s <= s_count; ++s) {
    const auto d = coin(rng) ? mates::moment_manhattan(sample, pick_order(rng), s)
                             : mates::lp_distance(sample, 0.5 + pick_order(rng) * 0.5, s);
    mates::GraphSpec g;
    const Index max_mst = (total - 1) / 2;
    g.kind = coin(rng) && max_mst >= 1 ? mates::GraphKind::kmst : mates::GraphKind::knn;
    const Index kmax = g.kind == mates::GraphKind::knn ? total - 1 : max_mst;
    g.k = static_cast<int>(std::uniform_int_distribution<Index>(1, kmax)(rng));
    g.weights = static_cast<mates::WeightScheme>(pick_scheme(rng));
    if (g.kind == mates::GraphKind::kmst && g.weights == mates::WeightScheme::rank) g.weights = mates::WeightScheme::kernel;
    try {
      f.views.push_back(mates::build_view(d, g));
    } catch (const mates::Degenerate&) {
      // Greedy tree peeling can run out of spanning edges; fall back to one tree.
      g.k = 1;
      f.views.push_back(mates::build_view(d, g));
    }
    f.weights.push_back(f.views.back().weights);
  }
  return f;
}

}  // namespace testing
