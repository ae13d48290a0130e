#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "lapd/core.hpp"
#include "lapd/simplex.hpp"

namespace lapd {

/// Two simplices sharing d vertices. `apex_first` / `apex_second` are the
/// positions (within each simplex) of the vertex not on the shared face.
struct AdjacentPair {
  Index first = 0, second = 0;
  std::uint8_t apex_first = 0, apex_second = 0;

  auto operator<=>(const AdjacentPair&) const = default;
};

/// All face-sharing pairs with first < second, by bucketing every simplex under
/// each of its d+1 faces. Sorted by (first, second).
std::vector<AdjacentPair> find_adjacent_pairs(const SimplexSet& set);

/// Vertices of the face shared by a pair (the first simplex minus its apex).
std::vector<Index> shared_face(const SimplexSet& set, const AdjacentPair& pair);

/// Dihedral angle in [0, pi] between the simplices face + apex_a and face + apex_b:
/// the angle between the apex residuals after projecting out the span of the
/// face around its centroid. Throws Error("anglegraph") for degenerate input.
double dihedral_angle(std::span<const Index> face, Index apex_a, Index apex_b, const PointCloud& cloud);

/// Edge weight for a dihedral angle, or nullopt when one-sided mode drops the pair.
std::optional<double> angle_weight(double theta, WeightMode mode, double delta);

struct SimplexEdge {
  Index a = 0, b = 0;
  double weight = 0.0;
};

struct SimplexGraph {
  Index nodes = 0;
  WeightMode mode = WeightMode::kOneSided;
  double delta = 1e-8;
  std::vector<SimplexEdge> edges;
  std::size_t degenerate_pairs = 0;  // adjacent pairs skipped for degenerate geometry
};

SimplexGraph build_simplex_graph(const SimplexSet& set, const PointCloud& cloud, WeightMode mode,
                                 double delta);

/// Induced subgraph on `keep` (ascending indices); node k of the result is keep[k].
SimplexGraph restrict_graph(const SimplexGraph& graph, std::span<const Index> keep);

/// `i j w` per line, weight printed with %.17g.
void write_edges(std::ostream& out, const SimplexGraph& graph);

}  // namespace lapd
