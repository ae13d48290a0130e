#include "lapd/simplex.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace lapd {

namespace {

/// Sorts fixed-width tuples stored back to back and drops duplicates.
std::vector<Index> sort_unique(const std::vector<Index>& flat, std::size_t width) {
  const std::size_t count = flat.size() / width;
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto tuple = [&](std::size_t t) { return flat.begin() + static_cast<std::ptrdiff_t>(t * width); };
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(tuple(a), tuple(a) + width, tuple(b), tuple(b) + width);
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<Index> out;
  out.reserve(flat.size());
  for (std::size_t k = 0; k < count; ++k) {
    if (k > 0 && std::equal(tuple(order[k]), tuple(order[k]) + width, tuple(order[k - 1]))) continue;
    out.insert(out.end(), tuple(order[k]), tuple(order[k]) + width);
  }
  return out;
}

/// Calls `emit(chosen)` for every size-`r` subset of [0, m) that `accept` keeps
/// extending; `accept(chosen, next)` may prune a partial subset.
template <class Accept, class Emit>
void for_each_subset(int m, int r, Accept&& accept, Emit&& emit) {
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(r));
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(chosen.size()) == r) {
      emit(chosen);
      return;
    }
    const int need = r - static_cast<int>(chosen.size());
    for (int next = start; next <= m - need; ++next) {
      if (!accept(chosen, next)) continue;
      chosen.push_back(next);
      self(self, next + 1);
      chosen.pop_back();
    }
  };
  rec(rec, 0);
}

double factorial(int d) {
  double f = 1.0;
  for (int k = 2; k <= d; ++k) f *= k;
  return f;
}

void edge_extremes(std::span<const Index> s, const PointCloud& cloud, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = 0.0;
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b) {
      const double len = cloud.distance(s[a], s[b]);
      lo = std::min(lo, len);
      hi = std::max(hi, len);
    }
}

}  // namespace

SimplexSet SimplexSet::subset(std::span<const Index> keep) const {
  SimplexSet out;
  out.d = d;
  out.e = e;
  out.q = q;
  out.r0 = r0;
  const auto w = static_cast<std::size_t>(d + 1);
  out.vertices.reserve(keep.size() * w);
  out.min_edge.reserve(keep.size());
  out.max_edge.reserve(keep.size());
  for (Index k : keep) {
    const auto s = (*this)[k];
    out.vertices.insert(out.vertices.end(), s.begin(), s.end());
    out.min_edge.push_back(min_edge[k]);
    out.max_edge.push_back(max_edge[k]);
  }
  return out;
}

std::vector<Simplex> enumerate_candidates(const AnnularGraph& graph, int d) {
  const auto width = static_cast<std::size_t>(d + 1);
  std::vector<Index> flat;
  std::vector<Index> tuple(width);
  for (Index x = 0; x < graph.neighbors.size(); ++x) {
    const auto& nb = graph.neighbors[x];
    if (static_cast<int>(nb.size()) < d) continue;
    for_each_subset(
        static_cast<int>(nb.size()), d, [](const std::vector<int>&, int) { return true; },
        [&](const std::vector<int>& chosen) {
          tuple[0] = x;
          for (int k = 0; k < d; ++k) tuple[static_cast<std::size_t>(k) + 1] = nb[static_cast<std::size_t>(chosen[static_cast<std::size_t>(k)])];
          std::sort(tuple.begin(), tuple.end());
          flat.insert(flat.end(), tuple.begin(), tuple.end());
        });
  }
  flat = sort_unique(flat, width);
  std::vector<Simplex> out;
  out.reserve(flat.size() / width);
  for (std::size_t t = 0; t < flat.size(); t += width)
    out.emplace_back(std::vector<Index>(flat.begin() + static_cast<std::ptrdiff_t>(t),
                                        flat.begin() + static_cast<std::ptrdiff_t>(t + width)));
  return out;
}

double distortion1(std::span<const Index> simplex, const PointCloud& cloud) {
  double lo, hi;
  edge_extremes(simplex, cloud, lo, hi);
  if (!(hi > 0.0) || !(lo > 0.0)) return 0.0;
  return lo / hi;
}

double regular_simplex_volume(int d) {
  return std::sqrt(static_cast<double>(d + 1)) / (factorial(d) * std::sqrt(std::pow(2.0, d)));
}

double simplex_volume(std::span<const Index> simplex, const PointCloud& cloud) {
  const int d = static_cast<int>(simplex.size()) - 1;
  if (d < 1) return 0.0;
  Eigen::MatrixXd edges(cloud.dim(), d);
  for (int k = 0; k < d; ++k)
    edges.col(k) = (cloud.point(simplex[static_cast<std::size_t>(k) + 1]) - cloud.point(simplex[0])).transpose();
  const double det = (edges.transpose() * edges).determinant();
  if (det < 1e-24) return 0.0;
  return std::sqrt(det) / factorial(d);
}

double distortion2(std::span<const Index> simplex, const PointCloud& cloud) {
  const int d = static_cast<int>(simplex.size()) - 1;
  double lo, hi;
  edge_extremes(simplex, cloud, lo, hi);
  if (!(lo > 0.0)) return 0.0;
  return simplex_volume(simplex, cloud) / (regular_simplex_volume(d) * std::pow(lo, d));
}

SimplexSet build_valid_set(const AnnularGraph& graph, const PointCloud& cloud, const Params& params) {
  if (params.d < 1 || !params.e || !params.q || !params.r0)
    throw Error("simplex", "parameters must be resolved before building simplices");
  const int d = params.d;
  const double e = *params.e, q = *params.q, r0 = *params.r0;
  const double lo2 = e * e, hi2 = (e / q) * (e / q);
  const auto width = static_cast<std::size_t>(d + 1);
  const Index n = cloud.size();

  auto edge_ok = [&](Index a, Index b) {
    const double s = cloud.squared_distance(a, b);
    return s >= lo2 && s <= hi2;
  };

  // Per-centre enumeration, pruning any partial subset with an out-of-range edge.
  std::vector<std::vector<Index>> per_centre(n);
#pragma omp parallel for schedule(dynamic, 32)
  for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(n); ++xi) {
    const auto x = static_cast<Index>(xi);
    std::vector<Index> cand;
    for (Index j : graph.neighbors[x])
      if (edge_ok(x, j)) cand.push_back(j);
    const int m = static_cast<int>(cand.size());
    if (m < d) continue;
    std::vector<char> ok(static_cast<std::size_t>(m * m), 0);
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        ok[static_cast<std::size_t>(a * m + b)] = ok[static_cast<std::size_t>(b * m + a)] =
            edge_ok(cand[static_cast<std::size_t>(a)], cand[static_cast<std::size_t>(b)]);
    std::vector<Index> tuple(width);
    auto& out = per_centre[x];
    for_each_subset(
        m, d,
        [&](const std::vector<int>& chosen, int next) {
          for (int c : chosen)
            if (!ok[static_cast<std::size_t>(c * m + next)]) return false;
          return true;
        },
        [&](const std::vector<int>& chosen) {
          tuple[0] = x;
          for (int k = 0; k < d; ++k)
            tuple[static_cast<std::size_t>(k) + 1] = cand[static_cast<std::size_t>(chosen[static_cast<std::size_t>(k)])];
          std::sort(tuple.begin(), tuple.end());
          out.insert(out.end(), tuple.begin(), tuple.end());
        });
  }

  std::vector<Index> flat;
  std::size_t total = 0;
  for (const auto& v : per_centre) total += v.size();
  flat.reserve(total);
  for (auto& v : per_centre) {
    flat.insert(flat.end(), v.begin(), v.end());
    std::vector<Index>().swap(v);
  }
  flat = sort_unique(flat, width);

  SimplexSet set;
  set.d = d;
  set.e = e;
  set.q = q;
  set.r0 = r0;
  const std::size_t count = flat.size() / width;
  set.vertices.reserve(flat.size());
  set.min_edge.reserve(count);
  set.max_edge.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    const std::span<const Index> s(flat.data() + t * width, width);
    double lo, hi;
    edge_extremes(s, cloud, lo, hi);
    if (!(lo > 0.0) || lo / hi < q) continue;
    if (r0 > 0.0 && distortion2(s, cloud) < r0) continue;
    set.vertices.insert(set.vertices.end(), s.begin(), s.end());
    set.min_edge.push_back(lo);
    set.max_edge.push_back(hi);
  }
  if (set.empty())
    throw EmptySimplexSet("no valid simplices (e = " + std::to_string(e) + ", q = " + std::to_string(q) +
                          "); try a different e or q");
  return set;
}

void write_simplices(std::ostream& out, const SimplexSet& set) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto s = set[i];
    for (std::size_t k = 0; k < s.size(); ++k) out << (k ? " " : "") << s[k];
    out << '\n';
  }
}

}  // namespace lapd
