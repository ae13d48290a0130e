#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lapd/core.hpp"

namespace lapd {

enum class ShapeKind { kHypercubes, kSpheres, kDollarSign, kThreePlanes };

std::string to_string(ShapeKind kind);
ShapeKind parse_shape_kind(const std::string& text);

/// Synthetic benchmark description. `theta` is the intersection angle in
/// radians (hypercubes only); `sigma` is the global noise scale, tau = sqrt(3) sigma.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::kHypercubes;
  int d = 1;
  int D = 2;
  Index n = 0;
  double theta = kHalfPi;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

void validate(const ShapeSpec& spec);

/// Draws points uniformly on the clean structures, then adds uniform noise of
/// half-width sqrt(3) sigma / sqrt(D - d) along each of the D - d directions
/// orthogonal to the structure at the sampled point.
///
/// hypercubes:   two unit d-cubes with a corner at the origin, hinged along a
///               shared (d-1)-face at dihedral angle theta.
/// spheres:      two unit d-spheres whose centres are 1 apart.
/// dollar_sign:  an S-curve of two radius-1/2 arcs and a segment crossing it (d = 1).
/// three_planes: three centred unit squares sharing an axis, pairwise angles
///               pi/2, pi/5 and 3pi/10 (d = 2).
PointCloud generate(const ShapeSpec& spec);

PointCloud load_csv(const std::filesystem::path& points,
                    const std::filesystem::path& labels = {});
void save_csv(const PointCloud& cloud, const std::filesystem::path& points);

std::vector<int> load_labels(const std::filesystem::path& path);
void save_labels(const std::vector<int>& labels, const std::filesystem::path& path);

}  // namespace lapd
