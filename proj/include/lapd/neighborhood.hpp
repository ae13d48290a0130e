#pragma once

#include <span>
#include <vector>

#include "lapd/core.hpp"

namespace lapd {

struct Neighbor {
  double sq_dist;
  Index index;

  auto operator<=>(const Neighbor&) const = default;
};

/// Exact k-d tree over the rows of a point matrix. The matrix must outlive the tree.
class KdTree {
 public:
  explicit KdTree(const Matrix& points, int leaf_size = 12);

  /// The k nearest rows to `query` whose squared distance is strictly greater
  /// than `min_sq_dist`, ordered by (distance, index). Row `exclude` is skipped.
  std::vector<Neighbor> nearest(std::span<const double> query, int k, double min_sq_dist = -1.0,
                                Index exclude = static_cast<Index>(-1)) const;

 private:
  struct Node {
    int split_dim = -1;  // -1 marks a leaf
    double split = 0.0;
    Index begin = 0, end = 0;
    int left = -1, right = -1;
  };

  int build(Index begin, Index end);

  const Matrix& points_;
  int leaf_size_;
  std::vector<Index> order_;
  std::vector<Node> nodes_;
};

/// Directed annular kNN graph: each point links to its B nearest points among
/// those at distance strictly greater than e.
struct AnnularGraph {
  std::vector<std::vector<Index>> neighbors;
  double e = 0.0;
  int B = 0;
};

AnnularGraph build_annular_graph(const PointCloud& cloud, double e, int B);

}  // namespace lapd
