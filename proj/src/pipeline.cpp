#include "lapd/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include "lapd/neighborhood.hpp"

#ifdef LAPD_WITH_OPENMP
#include <omp.h>
#endif

namespace lapd {

void set_thread_count(int threads) {
  if (threads < 0) throw Error("params", "thread count must be >= 0");
#ifdef LAPD_WITH_OPENMP
  const unsigned hw = std::thread::hardware_concurrency();
  omp_set_num_threads(threads > 0 ? threads : static_cast<int>(hw > 0 ? hw : 1));
#endif
}

double default_eta(std::span<const double> sorted_values) {
  std::vector<double> finite;
  finite.reserve(sorted_values.size());
  for (double v : sorted_values)
    if (std::isfinite(v)) finite.push_back(v);
  if (finite.empty()) throw Error("pipeline", "every kappa-NN distance is infinite; cannot pick eta");
  if (!std::is_sorted(finite.begin(), finite.end()))
    throw Error("pipeline", "default_eta expects values in ascending order");
  const std::size_t n = finite.size();
  const double lo = finite.front(), hi = finite.back();
  if (n < 3 || !(hi > lo)) return hi;

  std::size_t best = 0;
  double best_dist = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    const double y = (finite[i] - lo) / (hi - lo);
    const double dist = std::abs(y - x);  // chord is y = x after scaling
    if (dist > best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return finite[best];
}

std::vector<Index> denoise(std::span<const double> knn, double eta) {
  std::vector<Index> keep;
  for (std::size_t i = 0; i < knn.size(); ++i)
    if (knn[i] <= eta) keep.push_back(static_cast<Index>(i));
  return keep;
}

int estimate_m(const ScaleProfile& profile) {
  std::map<int, int> persistence;
  for (int c : profile.counts)
    if (c >= 1) ++persistence[c];
  if (persistence.empty()) throw Error("pipeline", "no scale has a nontrivial component; cannot estimate m");
  int best = 0, best_count = -1;
  for (const auto& [j, cj] : persistence)
    if (cj >= best_count) {  // ascending j, so ties go to the larger j
      best = j;
      best_count = cj;
    }
  return best;
}

namespace {

class ComponentSweep {
 public:
  explicit ComponentSweep(Index n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), Index{0}); }

  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  Index size(Index r) const { return size_[r]; }

  /// Returns (survivor, absorbed).
  std::pair<Index, Index> link(Index a, Index b) {
    if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return {a, b};
  }

 private:
  std::vector<Index> parent_;
  std::vector<Index> size_;
};

}  // namespace

CutResult cut(const MergeDendrogram& dendrogram, int m, double nu) {
  if (m < 1) throw Error("pipeline", "m must be at least 1");
  const Index n = dendrogram.node_count();
  const Index floor = trivial_floor(n, nu);
  const auto& events = dendrogram.events();

  // Nontrivial count after each group of equal-weight events.
  std::vector<std::size_t> group_end;
  std::vector<int> group_count;
  {
    ComponentSweep sweep(n);
    int count = 0;
    for (std::size_t k = 0; k < events.size(); ++k) {
      const Index a = sweep.find(events[k].root_a), b = sweep.find(events[k].root_b);
      count -= (sweep.size(a) > floor) + (sweep.size(b) > floor);
      const auto [r, _] = sweep.link(a, b);
      count += sweep.size(r) > floor;
      if (k + 1 == events.size() || events[k + 1].weight != events[k].weight) {
        group_end.push_back(k + 1);
        group_count.push_back(count);
      }
    }
  }

  CutResult result;
  int target = m;
  bool found = std::find(group_count.begin(), group_count.end(), m) != group_count.end();
  if (!found) {
    result.exact = false;
    int above = std::numeric_limits<int>::max(), below = 0;
    for (int c : group_count) {
      if (c > m) above = std::min(above, c);
      else below = std::max(below, c);
    }
    target = above != std::numeric_limits<int>::max() ? above : below;
    if (target == 0) throw Error("pipeline", "no threshold yields a nontrivial component");
  }
  // Coarsest run of groups with the target count, then its first group.
  std::size_t g = group_count.size();
  while (g-- > 0 && group_count[g] != target) {}
  while (g > 0 && group_count[g - 1] == target) --g;
  const std::size_t cut_end = group_end[g];
  result.threshold = events[cut_end - 1].weight;
  result.clusters = target;

  ComponentSweep sweep(n);
  for (std::size_t k = 0; k < cut_end; ++k) sweep.link(sweep.find(events[k].root_a), sweep.find(events[k].root_b));

  result.labels.assign(n, -1);
  std::vector<int> root_label(n, -1);
  int next = 0;
  for (Index v = 0; v < n; ++v) {
    const Index r = sweep.find(v);
    if (sweep.size(r) <= floor) continue;
    if (root_label[r] < 0) root_label[r] = next++;
    result.labels[v] = root_label[r];
  }
  // Members of still-unlabelled components, keyed by root.
  std::vector<std::vector<Index>> pending(n);
  for (Index v = 0; v < n; ++v)
    if (result.labels[v] < 0) pending[sweep.find(v)].push_back(v);

  for (std::size_t k = cut_end; k < events.size(); ++k) {
    const Index a = sweep.find(events[k].root_a), b = sweep.find(events[k].root_b);
    const int la = root_label[a], lb = root_label[b];
    const std::size_t sa = sweep.size(a), sb = sweep.size(b);
    const auto [keep, gone] = sweep.link(a, b);
    if (la >= 0 && lb >= 0) {
      root_label[keep] = sa >= sb ? la : lb;
    } else if (la >= 0 || lb >= 0) {
      const int label = la >= 0 ? la : lb;
      const Index unlabeled = la >= 0 ? b : a;
      for (Index v : pending[unlabeled]) result.labels[v] = label;
      std::vector<Index>().swap(pending[unlabeled]);
      root_label[keep] = label;
    } else {
      auto& into = pending[keep];
      auto& from = pending[gone];
      into.insert(into.end(), from.begin(), from.end());
      std::vector<Index>().swap(from);
    }
  }
  return result;
}

std::vector<int> majority_vote(std::span<const int> simplex_labels, const SimplexSet& set,
                               const PointCloud& cloud) {
  if (simplex_labels.size() != set.size()) throw Error("pipeline", "one label per simplex expected");
  const Index n = cloud.size();
  std::vector<std::vector<std::pair<int, int>>> tally(n);  // (label, votes)
  for (std::size_t s = 0; s < set.size(); ++s) {
    const int label = simplex_labels[s];
    if (label < 0) continue;
    for (Index v : set[s]) {
      auto& t = tally[v];
      auto it = std::find_if(t.begin(), t.end(), [&](const auto& p) { return p.first == label; });
      if (it == t.end()) t.emplace_back(label, 1);
      else ++it->second;
    }
  }
  std::vector<int> labels(n, -1);
  std::vector<Index> labeled;
  for (Index v = 0; v < n; ++v) {
    if (tally[v].empty()) continue;
    auto best = tally[v].front();
    for (const auto& p : tally[v])
      if (p.second > best.second || (p.second == best.second && p.first < best.first)) best = p;
    labels[v] = best.first;
    labeled.push_back(v);
  }
  if (labeled.empty()) throw Error("pipeline", "no point is covered by a labelled simplex");
  if (labeled.size() == n) return labels;

  Matrix anchors(static_cast<Eigen::Index>(labeled.size()), cloud.dim());
  for (std::size_t k = 0; k < labeled.size(); ++k) anchors.row(static_cast<Eigen::Index>(k)) = cloud.point(labeled[k]);
  const KdTree tree(anchors);
  for (Index v = 0; v < n; ++v) {
    if (labels[v] >= 0) continue;
    const std::span<const double> q(cloud.coords.data() + static_cast<std::ptrdiff_t>(v) * cloud.dim(),
                                    static_cast<std::size_t>(cloud.dim()));
    const auto nb = tree.nearest(q, 1);
    labels[v] = labels[labeled[nb.front().index]];
  }
  return labels;
}

double nlapd(const MergeDendrogram& dendrogram, const SimplexSet& set, Index point_count, Index i,
             Index j) {
  if (point_count > 2000)
    throw Error("pipeline", "nLAPD needs a quadratic pair search; limited to 2000 points");
  if (i >= point_count || j >= point_count) throw Error("pipeline", "point id out of range");
  std::vector<Index> with_i, with_j;
  for (Index s = 0; s < set.size(); ++s) {
    const auto verts = set[s];
    if (std::binary_search(verts.begin(), verts.end(), i)) with_i.push_back(s);
    if (std::binary_search(verts.begin(), verts.end(), j)) with_j.push_back(s);
  }
  if (with_i.empty() || with_j.empty())
    throw Error("pipeline", "point is not covered by any surviving simplex");
  double best = kInfinity;
  for (Index a : with_i)
    for (Index b : with_j) best = std::min(best, dendrogram.query(a, b));
  return best;
}

namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& out) : out_(out), start_(std::chrono::steady_clock::now()) {}

  void lap(const char* stage) {
    const auto now = std::chrono::steady_clock::now();
    out_.push_back({stage, std::chrono::duration<double, std::milli>(now - start_).count()});
    start_ = now;
  }

 private:
  std::vector<StageTiming>& out_;
  std::chrono::steady_clock::time_point start_;
};

template <class F>
auto in_stage(const char* stage, F&& f) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    throw Error(stage, ex.what());
  }
}

}  // namespace

ClusterResult run(const PointCloud& cloud, const Params& user) {
  ClusterResult result;
  StageClock clock(result.timings);

  const Params params = in_stage("params", [&] { return resolve_params(user, cloud); });
  if (cloud.size() < static_cast<Index>(params.d + 2))
    throw Error("params", "need at least d + 2 points");
  result.params = params;
  clock.lap("params");

  const auto graph = in_stage("neighborhood", [&] { return build_annular_graph(cloud, *params.e, *params.B); });
  clock.lap("neighborhood");

  SimplexSet simplices = in_stage("simplex", [&] { return build_valid_set(graph, cloud, params); });
  result.simplex_count = simplices.size();
  clock.lap("simplex");

  const auto full_graph = in_stage("anglegraph", [&] {
    return build_simplex_graph(simplices, cloud, params.weight_mode, *params.delta);
  });
  result.edge_count = full_graph.edges.size();
  result.degenerate_pairs = full_graph.degenerate_pairs;
  clock.lap("anglegraph");

  {
    const auto full = in_stage("dendrogram", [&] { return build_dendrogram(full_graph); });
    clock.lap("dendrogram");
    if (cloud.truth) result.gap_before = gap_report(full, simplices, *cloud.truth);
    result.knn = knn_lapd(full, *params.kappa);
  }
  if (params.eta) {
    result.eta = *params.eta;
  } else {
    std::vector<double> sorted = result.knn;
    std::sort(sorted.begin(), sorted.end());
    result.eta = default_eta(sorted);
    result.eta_estimated = true;
  }
  result.survivors = denoise(result.knn, result.eta);
  if (result.survivors.empty())
    throw Error("denoise", "no simplex survives denoising (eta = " + std::to_string(result.eta) + ")");
  {
    std::vector<char> kept(simplices.size(), 0);
    for (Index s : result.survivors) kept[s] = 1;
    for (Index s = 0; s < simplices.size(); ++s)
      if (!kept[s]) result.removed.push_back(s);
  }
  clock.lap("denoise");

  const auto dns_graph = restrict_graph(full_graph, result.survivors);
  result.simplices = simplices.subset(result.survivors);
  result.dendrogram = build_dendrogram(dns_graph);
  if (cloud.truth) result.gap_after = gap_report(result.dendrogram, result.simplices, *cloud.truth);
  clock.lap("recompute");

  result.profile = scale_profile(result.dendrogram, *params.k, *params.delta, *params.nu);
  if (params.m) {
    result.m_selected = *params.m;
  } else {
    result.m_selected = in_stage("estimate_m", [&] { return estimate_m(result.profile); });
    result.m_estimated = true;
  }
  clock.lap("estimate_m");

  const auto cut_result = in_stage("cut", [&] { return cut(result.dendrogram, result.m_selected, *params.nu); });
  result.cut_exact = cut_result.exact;
  clock.lap("cut");

  auto labels = in_stage("vote", [&] { return majority_vote(cut_result.labels, result.simplices, cloud); });
  std::map<int, int> compact;
  for (int l : labels) compact.emplace(l, 0);
  int next = 0;
  for (auto& [_, v] : compact) v = next++;
  for (int& l : labels) l = compact[l];
  result.simplex_labels = cut_result.labels;
  for (int& l : result.simplex_labels) {
    const auto it = compact.find(l);
    l = it == compact.end() ? -1 : it->second;
  }
  result.point_labels = std::move(labels);
  result.m_hat = next;
  clock.lap("vote");
  return result;
}

}  // namespace lapd
