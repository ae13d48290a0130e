#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "lapd/core.hpp"
#include "lapd/neighborhood.hpp"

namespace lapd {

/// Deduplicated valid d-simplices stored as a flat array of sorted vertex tuples.
struct SimplexSet {
  int d = 0;
  double e = 0.0, q = 0.0, r0 = 0.0;
  std::vector<Index> vertices;  // size() * (d + 1) entries
  std::vector<double> min_edge, max_edge;

  std::size_t size() const { return min_edge.size(); }
  bool empty() const { return size() == 0; }
  std::span<const Index> operator[](std::size_t i) const {
    const auto w = static_cast<std::size_t>(d + 1);
    return {vertices.data() + i * w, w};
  }

  /// Subset in the order given by `keep` (indices into this set).
  SimplexSet subset(std::span<const Index> keep) const;
};

/// Raised when filtering leaves no simplex at all.
class EmptySimplexSet : public Error {
 public:
  explicit EmptySimplexSet(const std::string& what) : Error("simplex", what) {}
};

/// Every (d+1)-subset made of a point and d of its annular neighbours, canonical
/// and deduplicated, in lexicographic order.
std::vector<Simplex> enumerate_candidates(const AnnularGraph& graph, int d);

/// min pairwise edge / max pairwise edge; 0 for coincident vertices.
double distortion1(std::span<const Index> simplex, const PointCloud& cloud);

/// d-volume over the volume of a regular simplex with the minimum edge length.
double distortion2(std::span<const Index> simplex, const PointCloud& cloud);

/// d-volume from the Gram determinant of the edge vectors; 0 when degenerate.
double simplex_volume(std::span<const Index> simplex, const PointCloud& cloud);

/// Volume of the regular d-simplex with unit edges, sqrt(d+1) / (d! sqrt(2^d)).
double regular_simplex_volume(int d);

/// Candidates whose pairwise edges all lie in [e, e/q], with Distortion1 >= q and,
/// when r0 > 0, Distortion2 >= r0. Throws EmptySimplexSet if nothing survives.
SimplexSet build_valid_set(const AnnularGraph& graph, const PointCloud& cloud, const Params& params);

/// One simplex per line, space-separated vertex indices.
void write_simplices(std::ostream& out, const SimplexSet& set);

}  // namespace lapd
