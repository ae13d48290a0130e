#include "lapd/lapd.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace lapd {

namespace {

class UnionFind {
 public:
  explicit UnionFind(Index n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), Index{0}); }

  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Links two distinct roots; the larger (then smaller-index) root survives.
  Index link(Index a, Index b) {
    if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
  }

  Index size(Index root) const { return size_[root]; }

 private:
  std::vector<Index> parent_;
  std::vector<Index> size_;
};

}  // namespace

MergeDendrogram build_dendrogram(const SimplexGraph& graph) {
  MergeDendrogram out;
  const Index n = graph.nodes;
  out.nodes_ = n;

  std::vector<std::size_t> order(graph.edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t k) {
    const auto& edge = graph.edges[k];
    return std::tuple(edge.weight, std::min(edge.a, edge.b), std::max(edge.a, edge.b));
  };
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return key(x) < key(y); });

  UnionFind uf(n);
  std::vector<Index> tree_of_root(n);
  std::iota(tree_of_root.begin(), tree_of_root.end(), Index{0});
  out.parent_.assign(n, -1);
  out.size_.assign(n, 1);
  out.events_.reserve(n > 0 ? n - 1 : 0);

  for (std::size_t k : order) {
    const auto& edge = graph.edges[k];
    const Index ra = uf.find(edge.a), rb = uf.find(edge.b);
    if (ra == rb) continue;
    const Index tree_node = n + static_cast<Index>(out.events_.size());
    const Index ta = tree_of_root[ra], tb = tree_of_root[rb];
    const Index merged = uf.link(ra, rb);
    out.events_.push_back({edge.weight, ra, rb, uf.size(merged)});
    out.parent_[ta] = tree_node;
    out.parent_[tb] = tree_node;
    out.parent_.push_back(-1);
    out.size_.push_back(uf.size(merged));
    tree_of_root[merged] = tree_node;
  }

  // Depths top-down: parents are always created after their children.
  const std::size_t total = out.parent_.size();
  out.depth_.assign(total, 0);
  for (std::size_t v = total; v-- > 0;)
    if (out.parent_[v] >= 0) out.depth_[v] = out.depth_[static_cast<std::size_t>(out.parent_[v])] + 1;

  const int levels = std::max(1, static_cast<int>(std::bit_width(total)));
  out.up_.assign(static_cast<std::size_t>(levels), std::vector<Index>(total));
  for (std::size_t v = 0; v < total; ++v)
    out.up_[0][v] = out.parent_[v] >= 0 ? static_cast<Index>(out.parent_[v]) : static_cast<Index>(v);
  for (int l = 1; l < levels; ++l)
    for (std::size_t v = 0; v < total; ++v)
      out.up_[static_cast<std::size_t>(l)][v] = out.up_[static_cast<std::size_t>(l - 1)][out.up_[static_cast<std::size_t>(l - 1)][v]];
  return out;
}

double MergeDendrogram::tree_weight(Index tree_node) const {
  return tree_node < nodes_ ? 0.0 : events_[tree_node - nodes_].weight;
}

Index MergeDendrogram::lca(Index a, Index b) const {
  if (depth_[a] < depth_[b]) std::swap(a, b);
  Index diff = depth_[a] - depth_[b];
  for (std::size_t l = 0; diff > 0; ++l, diff >>= 1)
    if (diff & 1U) a = up_[l][a];
  if (a == b) return a;
  for (std::size_t l = up_.size(); l-- > 0;)
    if (up_[l][a] != up_[l][b]) {
      a = up_[l][a];
      b = up_[l][b];
    }
  return up_[0][a] == up_[0][b] ? up_[0][a] : static_cast<Index>(-1);
}

double MergeDendrogram::query(Index i, Index j) const {
  if (i >= nodes_ || j >= nodes_) throw Error("lapd", "query node id out of range");
  if (i == j) return 0.0;
  const Index anc = lca(i, j);
  if (anc == static_cast<Index>(-1) || anc < nodes_) return kInfinity;
  return events_[anc - nodes_].weight;
}

std::vector<Index> MergeDendrogram::components_at(double t) const {
  UnionFind uf(nodes_);
  for (const auto& ev : events_) {
    if (ev.weight > t) break;
    uf.link(uf.find(ev.root_a), uf.find(ev.root_b));
  }
  constexpr Index kUnset = static_cast<Index>(-1);
  std::vector<Index> id_of_root(nodes_, kUnset), labels(nodes_);
  Index next = 0;
  for (Index v = 0; v < nodes_; ++v) {
    const Index r = uf.find(v);
    if (id_of_root[r] == kUnset) id_of_root[r] = next++;
    labels[v] = id_of_root[r];
  }
  return labels;
}

std::vector<double> knn_lapd(const MergeDendrogram& dendrogram, int kappa) {
  if (kappa < 1) throw Error("lapd", "kappa must be at least 1");
  const Index n = dendrogram.node_count();
  const std::size_t total = n + dendrogram.events().size();
  const auto need = static_cast<Index>(kappa) + 1;
  // best[v]: weight of the lowest ancestor-or-self event whose component holds
  // at least kappa + 1 nodes. Component sizes grow towards the root.
  std::vector<double> best(total, kInfinity);
  for (std::size_t v = total; v-- > n;) {
    const auto parent = dendrogram.tree_parent(static_cast<Index>(v));
    const double inherited = parent >= 0 ? best[static_cast<std::size_t>(parent)] : kInfinity;
    best[v] = dendrogram.tree_size(static_cast<Index>(v)) >= need ? dendrogram.tree_weight(static_cast<Index>(v))
                                                                  : inherited;
  }
  std::vector<double> out(n);
  for (Index v = 0; v < n; ++v) {
    const auto parent = dendrogram.tree_parent(v);
    out[v] = parent >= 0 ? best[static_cast<std::size_t>(parent)] : kInfinity;
  }
  return out;
}

Index trivial_floor(Index nodes, double nu) {
  const auto scaled = static_cast<Index>(std::ceil(nu * static_cast<double>(nodes)));
  return std::max<Index>(1, scaled);
}

std::vector<double> geometric_scales(int k, double delta) {
  if (k < 2) throw Error("lapd", "need at least two scales");
  if (!(delta > 0.0 && delta < kHalfPi)) throw Error("lapd", "delta must lie in (0, pi/2)");
  std::vector<double> scales(static_cast<std::size_t>(k));
  const double ratio = std::log(kHalfPi / delta);
  for (int i = 0; i < k; ++i) scales[static_cast<std::size_t>(i)] = delta * std::exp(ratio * i / (k - 1));
  scales.front() = delta;
  scales.back() = kHalfPi;
  return scales;
}

ScaleProfile scale_profile(const MergeDendrogram& dendrogram, std::vector<double> scales, double nu) {
  ScaleProfile profile;
  profile.scales = std::move(scales);
  profile.floor = trivial_floor(dendrogram.node_count(), nu);
  UnionFind uf(dendrogram.node_count());
  int nontrivial = 0;
  const auto& events = dendrogram.events();
  std::size_t next = 0;
  for (double t : profile.scales) {
    for (; next < events.size() && events[next].weight <= t; ++next) {
      const Index ra = uf.find(events[next].root_a), rb = uf.find(events[next].root_b);
      nontrivial -= (uf.size(ra) > profile.floor) + (uf.size(rb) > profile.floor);
      const Index merged = uf.link(ra, rb);
      nontrivial += uf.size(merged) > profile.floor;
    }
    profile.counts.push_back(nontrivial);
  }
  return profile;
}

ScaleProfile scale_profile(const MergeDendrogram& dendrogram, int k, double delta, double nu) {
  return scale_profile(dendrogram, geometric_scales(k, delta), nu);
}

void write_events(std::ostream& out, const MergeDendrogram& dendrogram) {
  char buf[32];
  for (const auto& ev : dendrogram.events()) {
    std::snprintf(buf, sizeof buf, "%.17g", ev.weight);
    out << buf << ' ' << ev.root_a << ' ' << ev.root_b << ' ' << ev.size << '\n';
  }
}

}  // namespace lapd
