#include "lapd/eval.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace lapd {

namespace {

struct Confusion {
  std::vector<std::vector<double>> counts;  // pred label x true label
};

Confusion confusion(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw Error("eval", "prediction and truth lengths differ");
  std::map<int, std::size_t> pi, ti;
  for (int v : pred) pi.emplace(v, 0);
  for (int v : truth) ti.emplace(v, 0);
  std::size_t k = 0;
  for (auto& [_, idx] : pi) idx = k++;
  k = 0;
  for (auto& [_, idx] : ti) idx = k++;
  Confusion c;
  c.counts.assign(pi.size(), std::vector<double>(ti.size(), 0.0));
  for (std::size_t i = 0; i < pred.size(); ++i) c.counts[pi[pred[i]]][ti[truth[i]]] += 1.0;
  return c;
}

}  // namespace

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& score) {
  const std::size_t rows = score.size();
  const std::size_t cols = rows ? score[0].size() : 0;
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return {};
  double top = 0.0;
  for (const auto& r : score)
    for (double v : r) top = std::max(top, v);
  // Hungarian algorithm (potentials form) on the padded square cost matrix.
  auto cost = [&](std::size_t i, std::size_t j) {
    return (i < rows && j < cols) ? top - score[i][j] : top;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(rows, -1);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] >= 1 && p[j] - 1 < rows && j - 1 < cols) match[p[j] - 1] = static_cast<int>(j - 1);
  return match;
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
  const auto c = confusion(pred, truth);
  if (pred.empty()) return 1.0;
  const auto match = max_weight_assignment(c.counts);
  double agree = 0.0;
  for (std::size_t r = 0; r < match.size(); ++r)
    if (match[r] >= 0) agree += c.counts[r][static_cast<std::size_t>(match[r])];
  return agree / static_cast<double>(pred.size());
}

double accuracy_exhaustive(std::span<const int> pred, std::span<const int> truth) {
  const auto c = confusion(pred, truth);
  if (pred.empty()) return 1.0;
  const std::size_t rows = c.counts.size(), cols = c.counts[0].size();
  if (rows > 8 || cols > 8) throw Error("eval", "exhaustive accuracy limited to 8 labels");
  // Permute the padded column set; rows beyond `rows` or columns beyond `cols` score 0.
  const std::size_t n = std::max(rows, cols);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = 0.0;
  do {
    double agree = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
      if (perm[r] < cols) agree += c.counts[r][perm[r]];
    best = std::max(best, agree);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(pred.size());
}

std::vector<int> simplex_classes(const SimplexSet& set, std::span<const int> point_truth) {
  std::vector<int> classes(set.size());
  for (std::size_t s = 0; s < set.size(); ++s) {
    const auto verts = set[s];
    const int first = point_truth[verts[0]];
    bool pure = true;
    for (Index v : verts) pure = pure && point_truth[v] == first;
    classes[s] = pure ? first : -1;
  }
  return classes;
}

GapReport gap_report(const MergeDendrogram& dendrogram, const SimplexSet& set,
                     std::span<const int> point_truth) {
  if (dendrogram.node_count() != set.size())
    throw Error("eval", "dendrogram does not match simplex set");
  for (const auto& s : set.vertices)
    if (s >= point_truth.size()) throw Error("eval", "truth labels do not cover every simplex vertex");

  GapReport report;
  const auto raw = simplex_classes(set, point_truth);
  // Compact truth classes to 0..C-1 for dense per-component tallies.
  std::map<int, int> compact;
  for (int c : raw)
    if (c >= 0) compact.emplace(c, 0);
  std::vector<int> class_of_index;
  for (auto& [label, idx] : compact) {
    idx = static_cast<int>(class_of_index.size());
    class_of_index.push_back(label);
  }
  const std::size_t C = class_of_index.size();
  const Index n = dendrogram.node_count();

  std::vector<Index> fragments(C, 0);  // components holding pure simplices of the class
  std::vector<std::vector<Index>> tally(n);  // lazily sized per root
  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), Index{0});
  for (Index s = 0; s < n; ++s) {
    if (raw[s] < 0) {
      ++report.mixed_count;
      continue;
    }
    const auto c = static_cast<std::size_t>(compact[raw[s]]);
    tally[s].assign(C, 0);
    tally[s][c] = 1;
    ++fragments[c];
    ++report.pure_counts[raw[s]];
  }
  std::set<int> all_truth(point_truth.begin(), point_truth.end());
  for (int c : all_truth)
    if (!compact.contains(c)) report.excluded_classes.push_back(c);

  auto find = [&](Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto classes_in = [&](const std::vector<Index>& t) {
    std::size_t k = 0;
    for (Index v : t) k += v > 0;
    return k;
  };

  std::vector<double> joined(C, kInfinity);
  for (std::size_t c = 0; c < C; ++c)
    if (fragments[c] <= 1) joined[c] = 0.0;
  for (const auto& ev : dendrogram.events()) {
    Index a = find(ev.root_a), b = find(ev.root_b);
    if (a == b) continue;
    auto& ta = tally[a];
    auto& tb = tally[b];
    if (!ta.empty() && !tb.empty()) {
      // Different classes meeting for the first time fixes the between gap.
      if (report.blapd == kInfinity) {
        for (std::size_t c = 0; c < C && report.blapd == kInfinity; ++c)
          if (ta[c] > 0 && classes_in(tb) > (tb[c] > 0 ? 1U : 0U)) report.blapd = ev.weight;
      }
      for (std::size_t c = 0; c < C; ++c) {
        if (ta[c] == 0 || tb[c] == 0) continue;
        report.wlapd_connected = std::max(report.wlapd_connected, ev.weight);
        if (--fragments[c] == 1) joined[c] = ev.weight;
      }
    }
    if (ta.size() < tb.size() || (ta.empty() && !tb.empty())) std::swap(a, b);
    auto& keep = tally[a];
    auto& gone = tally[b];
    if (!gone.empty()) {
      if (keep.empty()) keep.assign(C, 0);
      for (std::size_t c = 0; c < C; ++c) keep[c] += gone[c];
      std::vector<Index>().swap(gone);
    }
    parent[b] = a;
  }
  report.wlapd = 0.0;
  for (double w : joined) report.wlapd = std::max(report.wlapd, w);
  return report;
}

}  // namespace lapd
