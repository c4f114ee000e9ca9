#include "mates/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "mates/dissim.hpp"
#include "mates/error.hpp"

namespace mates {

std::string ViewSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case DissimilarityKind::moment:
      os << "moment:" << order;
      break;
    case DissimilarityKind::lp:
      os << "lp:" << order;
      break;
    case DissimilarityKind::precomputed:
      os << "precomputed:" << source;
      break;
  }
  return os.str();
}

std::vector<ViewSpec> default_views(int moments) {
  std::vector<ViewSpec> views;
  for (int s = 1; s <= moments; ++s) {
    ViewSpec v;
    v.kind = DissimilarityKind::moment;
    v.order = s;
    views.push_back(v);
  }
  return views;
}

std::vector<WeightedView> build_views(const SampleMatrix& sample, std::span<const ViewSpec> specs) {
  if (specs.empty()) throw InvalidArgument("at least one view is required");
  std::vector<WeightedView> views;
  views.reserve(specs.size());
  int index = 1;
  for (const auto& spec : specs) {
    auto d = [&]() -> DissimilarityMatrix {
      switch (spec.kind) {
        case DissimilarityKind::moment: {
          if (spec.order < 1.0 || spec.order != std::floor(spec.order)) {
            throw InvalidArgument("moment order must be a positive integer");
          }
          return moment_manhattan(sample, static_cast<int>(spec.order), index);
        }
        case DissimilarityKind::lp:
          return lp_distance(sample, spec.order, index);
        case DissimilarityKind::precomputed:
          if (!spec.matrix) throw InvalidArgument("precomputed view without a matrix");
          return precomputed(*spec.matrix, index, sample.size());
      }
      throw InvalidArgument("unknown dissimilarity kind");
    }();
    views.push_back(build_view(d, spec.graph));
    ++index;
  }
  return views;
}

}  // namespace mates
