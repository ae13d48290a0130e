#include "lapd/anglegraph.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace lapd {

namespace {

struct FaceEntry {
  Index simplex;
  std::uint8_t apex;
};

/// k-th vertex of the face of `s` opposite position `apex`.
inline Index face_vertex(std::span<const Index> s, std::uint8_t apex, std::size_t k) {
  return s[k < apex ? k : k + 1];
}

}  // namespace

std::vector<AdjacentPair> find_adjacent_pairs(const SimplexSet& set) {
  const auto width = static_cast<std::size_t>(set.d + 1);
  const std::size_t face_width = width - 1;
  std::vector<FaceEntry> entries;
  entries.reserve(set.size() * width);
  for (Index s = 0; s < set.size(); ++s)
    for (std::size_t a = 0; a < width; ++a) entries.push_back({s, static_cast<std::uint8_t>(a)});

  auto compare = [&](const FaceEntry& x, const FaceEntry& y) {
    const auto sx = set[x.simplex], sy = set[y.simplex];
    for (std::size_t k = 0; k < face_width; ++k) {
      const Index vx = face_vertex(sx, x.apex, k), vy = face_vertex(sy, y.apex, k);
      if (vx != vy) return vx < vy ? -1 : 1;
    }
    return 0;
  };
  std::sort(entries.begin(), entries.end(), [&](const FaceEntry& x, const FaceEntry& y) {
    const int c = compare(x, y);
    return c != 0 ? c < 0 : x.simplex < y.simplex;
  });

  std::vector<AdjacentPair> pairs;
  for (std::size_t lo = 0; lo < entries.size();) {
    std::size_t hi = lo + 1;
    while (hi < entries.size() && compare(entries[lo], entries[hi]) == 0) ++hi;
    for (std::size_t a = lo; a < hi; ++a)
      for (std::size_t b = a + 1; b < hi; ++b)  // simplex ids ascend within a bucket
        pairs.push_back({entries[a].simplex, entries[b].simplex, entries[a].apex, entries[b].apex});
    lo = hi;
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<Index> shared_face(const SimplexSet& set, const AdjacentPair& pair) {
  const auto s = set[pair.first];
  std::vector<Index> face;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) face.push_back(face_vertex(s, pair.apex_first, k));
  return face;
}

double dihedral_angle(std::span<const Index> face, Index apex_a, Index apex_b, const PointCloud& cloud) {
  const auto D = static_cast<std::size_t>(cloud.dim());
  const std::size_t f = face.size();
  if (f == 0) throw Error("anglegraph", "shared face is empty");
  const double* data = cloud.coords.data();
  auto row = [&](Index i) { return data + static_cast<std::size_t>(i) * D; };

  thread_local std::vector<double> centroid, basis, work, va, vb;
  centroid.assign(D, 0.0);
  for (Index v : face) {
    const double* p = row(v);
    for (std::size_t c = 0; c < D; ++c) centroid[c] += p[c];
  }
  for (double& c : centroid) c /= static_cast<double>(f);

  // Modified Gram-Schmidt with one re-orthogonalisation pass.
  basis.clear();
  std::size_t rank = 0;
  work.resize(D);
  double max_norm = 0.0;
  for (Index v : face) {
    const double* p = row(v);
    double s = 0.0;
    for (std::size_t c = 0; c < D; ++c) s += (p[c] - centroid[c]) * (p[c] - centroid[c]);
    max_norm = std::max(max_norm, std::sqrt(s));
  }
  const double tol = 1e-10 * max_norm;
  auto project_out = [&](std::vector<double>& vec) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t b = 0; b < rank; ++b) {
        const double* q = basis.data() + b * D;
        double dot = 0.0;
        for (std::size_t c = 0; c < D; ++c) dot += vec[c] * q[c];
        for (std::size_t c = 0; c < D; ++c) vec[c] -= dot * q[c];
      }
  };
  for (Index v : face) {
    if (rank + 1 >= f) break;  // centred face vectors span at most f - 1 dimensions
    const double* p = row(v);
    for (std::size_t c = 0; c < D; ++c) work[c] = p[c] - centroid[c];
    project_out(work);
    double s = 0.0;
    for (double w : work) s += w * w;
    const double norm = std::sqrt(s);
    if (norm <= tol || norm == 0.0) continue;
    for (double& w : work) w /= norm;
    basis.insert(basis.end(), work.begin(), work.end());
    ++rank;
  }
  if (rank + 1 < f) throw Error("anglegraph", "shared face is rank deficient");

  auto residual = [&](Index apex, std::vector<double>& out) {
    out.resize(D);
    const double* p = row(apex);
    for (std::size_t c = 0; c < D; ++c) out[c] = p[c] - centroid[c];
    project_out(out);
    double s = 0.0;
    for (double w : out) s += w * w;
    return std::sqrt(s);
  };
  const double na = residual(apex_a, va);
  const double nb = residual(apex_b, vb);
  if (na < 1e-12 || nb < 1e-12) throw Error("anglegraph", "apex lies in the span of the shared face");
  double dot = 0.0;
  for (std::size_t c = 0; c < D; ++c) dot += va[c] * vb[c];
  const double cosine = std::clamp(dot / (na * nb), -1.0, 1.0);
  return std::acos(cosine);
}

std::optional<double> angle_weight(double theta, WeightMode mode, double delta) {
  if (mode == WeightMode::kOneSided) {
    if (theta < kHalfPi) return std::nullopt;
    return std::clamp(kPi - theta, delta, kHalfPi);
  }
  return std::clamp(std::min(kPi - theta, theta), delta, kHalfPi);
}

SimplexGraph build_simplex_graph(const SimplexSet& set, const PointCloud& cloud, WeightMode mode,
                                 double delta) {
  if (!(delta > 0.0)) throw Error("anglegraph", "delta must be positive");
  if (set.d > kMaxIntrinsicDim) throw Error("anglegraph", "intrinsic dimension too large");
  const auto pairs = find_adjacent_pairs(set);
  std::vector<double> weight(pairs.size(), -1.0);
  std::size_t degenerate = 0;
#pragma omp parallel for schedule(dynamic, 1024) reduction(+ : degenerate)
  for (std::int64_t p = 0; p < static_cast<std::int64_t>(pairs.size()); ++p) {
    const auto& pr = pairs[static_cast<std::size_t>(p)];
    const auto sa = set[pr.first], sb = set[pr.second];
    Index face[kMaxIntrinsicDim + 1];
    std::size_t f = 0;
    for (std::size_t k = 0; k + 1 < sa.size(); ++k) face[f++] = sa[k < pr.apex_first ? k : k + 1];
    try {
      const double theta =
          dihedral_angle(std::span<const Index>(face, f), sa[pr.apex_first], sb[pr.apex_second], cloud);
      if (auto w = angle_weight(theta, mode, delta)) weight[static_cast<std::size_t>(p)] = *w;
    } catch (const Error&) {
      ++degenerate;
    }
  }
  SimplexGraph graph;
  graph.nodes = static_cast<Index>(set.size());
  graph.mode = mode;
  graph.delta = delta;
  graph.degenerate_pairs = degenerate;
  for (std::size_t p = 0; p < pairs.size(); ++p)
    if (weight[p] >= 0.0) graph.edges.push_back({pairs[p].first, pairs[p].second, weight[p]});
  return graph;
}

SimplexGraph restrict_graph(const SimplexGraph& graph, std::span<const Index> keep) {
  constexpr Index kDropped = static_cast<Index>(-1);
  std::vector<Index> remap(graph.nodes, kDropped);
  for (std::size_t k = 0; k < keep.size(); ++k) remap[keep[k]] = static_cast<Index>(k);
  SimplexGraph out;
  out.nodes = static_cast<Index>(keep.size());
  out.mode = graph.mode;
  out.delta = graph.delta;
  for (const auto& edge : graph.edges) {
    const Index a = remap[edge.a], b = remap[edge.b];
    if (a != kDropped && b != kDropped) out.edges.push_back({a, b, edge.weight});
  }
  return out;
}

void write_edges(std::ostream& out, const SimplexGraph& graph) {
  char buf[32];
  for (const auto& edge : graph.edges) {
    std::snprintf(buf, sizeof buf, "%.17g", edge.weight);
    out << edge.a << ' ' << edge.b << ' ' << buf << '\n';
  }
}

}  // namespace lapd
