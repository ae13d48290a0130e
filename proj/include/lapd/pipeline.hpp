#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lapd/anglegraph.hpp"
#include "lapd/core.hpp"
#include "lapd/eval.hpp"
#include "lapd/lapd.hpp"
#include "lapd/simplex.hpp"

namespace lapd {

/// Caps worker threads for parallel stages; 0 means the hardware count. No-op
/// in builds without OpenMP.
void set_thread_count(int threads);

/// Elbow of an ascending curve: the value whose point lies farthest from the
/// chord joining the first and last finite points (both axes scaled to [0,1]).
double default_eta(std::span<const double> sorted_values);

/// Indices with knn value <= eta, ascending.
std::vector<Index> denoise(std::span<const double> knn, double eta);

/// Persistence estimate: the count attained at the most scales (ties go to
/// the larger count). Zero counts are ignored.
int estimate_m(const ScaleProfile& profile);

struct CutResult {
  std::vector<int> labels;  // per node, -1 if never joined to a cluster
  double threshold = 0.0;
  int clusters = 0;
  bool exact = true;  // false when no threshold gave exactly m clusters
};

/// Clusters = nontrivial components (size > floor) at the smallest threshold of
/// the coarsest run of merge events with exactly m of them. Trivial components
/// inherit the label of the first cluster they merge into afterwards.
CutResult cut(const MergeDendrogram& dendrogram, int m, double nu);

/// Most frequent label among the simplices containing each point (ties to the
/// smaller label); uncovered points copy their nearest labelled point.
std::vector<int> majority_vote(std::span<const int> simplex_labels, const SimplexSet& set,
                               const PointCloud& cloud);

/// Point-level minimax distance: minimum over simplex pairs containing i and j.
/// Limited to clouds of at most 2000 points.
double nlapd(const MergeDendrogram& dendrogram, const SimplexSet& set, Index point_count, Index i,
             Index j);

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct ClusterResult {
  Params params;                 // resolved
  std::vector<int> point_labels;  // values 0..m_hat-1
  std::vector<int> simplex_labels;  // per surviving simplex, -1 if unassigned
  int m_hat = 0;
  int m_selected = 0;  // m requested or estimated before label compaction
  bool m_estimated = false;
  bool cut_exact = true;
  double eta = 0.0;
  bool eta_estimated = false;

  std::size_t simplex_count = 0;  // valid simplices before denoising
  std::size_t edge_count = 0;
  std::size_t degenerate_pairs = 0;
  std::vector<Index> survivors;  // indices into the valid set
  std::vector<Index> removed;
  std::vector<double> knn;  // per valid simplex
  ScaleProfile profile;     // on the denoised graph

  std::optional<GapReport> gap_before, gap_after;
  std::vector<StageTiming> timings;

  SimplexSet simplices;        // denoised set
  MergeDendrogram dendrogram;  // on the denoised set
};

/// Annular graph, simplices, angle graph, merge sweep, kappa-NN denoising,
/// recomputed sweep, cluster count, cut and majority vote. Gap diagnostics are
/// filled when the cloud carries truth labels.
ClusterResult run(const PointCloud& cloud, const Params& params);

}  // namespace lapd
