#include "lapd/neighborhood.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace lapd {

KdTree::KdTree(const Matrix& points, int leaf_size)
    : points_(points), leaf_size_(std::max(1, leaf_size)) {
  order_.resize(static_cast<std::size_t>(points.rows()));
  std::iota(order_.begin(), order_.end(), Index{0});
  if (!order_.empty()) {
    nodes_.reserve(2 * order_.size() / static_cast<std::size_t>(leaf_size_) + 1);
    build(0, static_cast<Index>(order_.size()));
  }
}

int KdTree::build(Index begin, Index end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{-1, 0.0, begin, end, -1, -1});
  if (end - begin <= static_cast<Index>(leaf_size_)) return id;

  // split on the dimension of largest spread
  const auto dims = points_.cols();
  int best_dim = 0;
  double best_spread = -1.0;
  for (Eigen::Index c = 0; c < dims; ++c) {
    double lo = points_(order_[begin], c), hi = lo;
    for (Index i = begin + 1; i < end; ++i) {
      const double v = points_(order_[i], c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = static_cast<int>(c);
    }
  }
  if (best_spread <= 0.0) return id;  // all coincident

  const Index mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](Index a, Index b) { return points_(a, best_dim) < points_(b, best_dim); });
  const double split = points_(order_[mid], best_dim);

  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].split_dim = best_dim;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<Neighbor> KdTree::nearest(std::span<const double> query, int k, double min_sq_dist,
                                      Index exclude) const {
  std::priority_queue<Neighbor> heap;  // max-heap on (distance, index)
  if (k <= 0 || nodes_.empty()) return {};
  const auto dims = points_.cols();

  auto visit_leaf = [&](const Node& node) {
    for (Index p = node.begin; p < node.end; ++p) {
      const Index idx = order_[p];
      if (idx == exclude) continue;
      double s = 0.0;
      const double* row = points_.data() + static_cast<std::ptrdiff_t>(idx) * dims;
      for (Eigen::Index c = 0; c < dims; ++c) {
        const double diff = row[c] - query[static_cast<std::size_t>(c)];
        s += diff * diff;
      }
      if (s <= min_sq_dist) continue;
      const Neighbor cand{s, idx};
      if (static_cast<int>(heap.size()) < k) {
        heap.push(cand);
      } else if (cand < heap.top()) {
        heap.pop();
        heap.push(cand);
      }
    }
  };

  auto search = [&](auto&& self, int id) -> void {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.split_dim < 0) {
      visit_leaf(node);
      return;
    }
    const double diff = query[static_cast<std::size_t>(node.split_dim)] - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    self(self, near);
    // equality must still be visited so that index tie-breaks stay exact
    if (static_cast<int>(heap.size()) < k || diff * diff <= heap.top().sq_dist) self(self, far);
  };
  search(search, 0);

  std::vector<Neighbor> out(heap.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    *it = heap.top();
    heap.pop();
  }
  return out;
}

AnnularGraph build_annular_graph(const PointCloud& cloud, double e, int B) {
  if (!(e > 0.0)) throw Error("neighborhood", "edge length e must be positive");
  if (B < 1) throw Error("neighborhood", "B must be at least 1");
  const KdTree tree(cloud.coords);
  AnnularGraph graph;
  graph.e = e;
  graph.B = B;
  const Index n = cloud.size();
  graph.neighbors.resize(n);
  const double e2 = e * e;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const auto idx = static_cast<Index>(i);
    const std::span<const double> q(cloud.coords.data() + i * cloud.dim(),
                                    static_cast<std::size_t>(cloud.dim()));
    auto found = tree.nearest(q, B, e2, idx);
    auto& list = graph.neighbors[idx];
    list.reserve(found.size());
    for (const auto& nb : found) list.push_back(nb.index);
  }
  return graph;
}

}  // namespace lapd
