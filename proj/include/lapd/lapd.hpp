#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "lapd/anglegraph.hpp"
#include "lapd/core.hpp"

namespace lapd {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A successful union in the ascending-weight sweep. `root_a`/`root_b` are the
/// union-find representatives just before the merge; `size` is the merged size.
struct MergeEvent {
  double weight = 0.0;
  Index root_a = 0, root_b = 0;
  Index size = 0;
};

/// Single-linkage structure of the minimax path metric on a simplex graph.
///
/// Internally this is the Kruskal merge tree: leaves are graph nodes, internal
/// node N + k is created by event k and carries its weight. The minimax
/// distance between two nodes is the weight at their lowest common ancestor.
class MergeDendrogram {
 public:
  MergeDendrogram() = default;

  Index node_count() const { return nodes_; }
  const std::vector<MergeEvent>& events() const { return events_; }
  Index component_count() const { return nodes_ - static_cast<Index>(events_.size()); }

  /// Minimax path distance; 0 on the diagonal, +inf across components.
  double query(Index i, Index j) const;

  /// Compact component ids (numbered by smallest member) of the subgraph with
  /// weights <= t.
  std::vector<Index> components_at(double t) const;

  /// Parent in the merge tree, or -1 for a root. Ids >= node_count() are events.
  std::int64_t tree_parent(Index tree_node) const { return parent_[tree_node]; }
  double tree_weight(Index tree_node) const;
  Index tree_size(Index tree_node) const { return size_[tree_node]; }

  friend MergeDendrogram build_dendrogram(const SimplexGraph& graph);

 private:
  Index lca(Index a, Index b) const;

  Index nodes_ = 0;
  std::vector<MergeEvent> events_;
  std::vector<std::int64_t> parent_;  // merge tree, size nodes_ + events
  std::vector<Index> size_;
  std::vector<Index> depth_;
  std::vector<std::vector<Index>> up_;  // binary lifting table
};

/// Sorts edges by (weight, a, b) and sweeps them with union-find.
MergeDendrogram build_dendrogram(const SimplexGraph& graph);

/// Per node: distance to its kappa-th nearest other node under the minimax
/// metric, i.e. the first event weight at which its component exceeds kappa
/// members; +inf if it never does.
std::vector<double> knn_lapd(const MergeDendrogram& dendrogram, int kappa);

/// Component counts at k geometrically spaced thresholds from delta to pi/2.
struct ScaleProfile {
  std::vector<double> scales;
  std::vector<int> counts;  // components larger than the trivial-size floor
  Index floor = 1;
};

/// Size floor for a nontrivial component: max(1, ceil(nu * nodes)).
Index trivial_floor(Index nodes, double nu);

std::vector<double> geometric_scales(int k, double delta);

ScaleProfile scale_profile(const MergeDendrogram& dendrogram, int k, double delta, double nu);

/// Profile over caller-chosen ascending thresholds.
ScaleProfile scale_profile(const MergeDendrogram& dendrogram, std::vector<double> scales, double nu);

/// `w rootA rootB size` per event.
void write_events(std::ostream& out, const MergeDendrogram& dendrogram);

}  // namespace lapd
