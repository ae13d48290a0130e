#pragma once

#include <map>
#include <span>
#include <vector>

#include "lapd/lapd.hpp"
#include "lapd/simplex.hpp"

namespace lapd {

/// Fraction of points labelled correctly under the best one-to-one matching of
/// predicted to true labels. Labels may be arbitrary integers.
double accuracy(std::span<const int> pred, std::span<const int> truth);

/// Same quantity by trying every injection between the two label alphabets.
/// Only for small alphabets (both at most 8 labels).
double accuracy_exhaustive(std::span<const int> pred, std::span<const int> truth);

/// Maximum-weight assignment on a rectangular score matrix (rows x cols).
/// Returns the column matched to each row, or -1.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& score);

/// Within/between-manifold minimax gap over pure simplices.
struct GapReport {
  double wlapd = 0.0;  // +inf when some class is split across graph components
  double wlapd_connected = 0.0;  // same maximum over pairs joined by some path
  double blapd = kInfinity;
  std::map<int, Index> pure_counts;  // truth class -> pure simplices
  Index mixed_count = 0;
  std::vector<int> excluded_classes;  // classes present in the truth without pure simplices
};

/// Simplex truth class, or -1 for a mixed simplex.
std::vector<int> simplex_classes(const SimplexSet& set, std::span<const int> point_truth);

/// Computed from the merge events with per-component class tallies.
GapReport gap_report(const MergeDendrogram& dendrogram, const SimplexSet& set,
                     std::span<const int> point_truth);

}  // namespace lapd
