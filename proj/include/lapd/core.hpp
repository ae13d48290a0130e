#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lapd {

using Index = std::uint32_t;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kHalfPi = 1.57079632679489661923;
inline constexpr double kPi = 3.14159265358979323846;

/// Error raised by any stage of the library. `stage()` names the step that failed
/// ("params", "datasets", "simplex", "pipeline", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

enum class WeightMode { kOneSided, kTwoSided };

std::string to_string(WeightMode mode);
WeightMode parse_weight_mode(const std::string& text);

/// Parameter set of the clustering algorithm. Unset optionals are filled by
/// resolve_params; `eta` and `m` stay unset to request automatic selection.
struct Params {
  int d = 0;
  std::optional<double> tau;
  std::optional<double> e;
  std::optional<double> q;
  std::optional<double> r0;
  std::optional<int> B;
  std::optional<int> kappa;
  std::optional<double> eta;
  std::optional<int> k;
  std::optional<int> m;
  WeightMode weight_mode = WeightMode::kOneSided;
  std::optional<double> delta;
  std::optional<double> nu;
  std::uint64_t seed = 0;

  bool operator==(const Params&) const = default;
};

/// Largest supported intrinsic dimension.
inline constexpr int kMaxIntrinsicDim = 15;

/// n points in R^D, optionally with ground-truth labels.
struct PointCloud {
  Matrix coords;
  std::optional<std::vector<int>> truth;

  PointCloud() = default;
  explicit PointCloud(Matrix c, std::optional<std::vector<int>> t = std::nullopt);

  Index size() const { return static_cast<Index>(coords.rows()); }
  int dim() const { return static_cast<int>(coords.cols()); }
  auto point(Index i) const { return coords.row(i); }
  double squared_distance(Index i, Index j) const {
    return (coords.row(i) - coords.row(j)).squaredNorm();
  }
  double distance(Index i, Index j) const { return std::sqrt(squared_distance(i, j)); }
};

/// d+1 distinct point indices in strictly increasing order.
class Simplex {
 public:
  explicit Simplex(std::vector<Index> vertices);

  std::span<const Index> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  Index operator[](std::size_t i) const { return vertices_[i]; }

  auto operator<=>(const Simplex&) const = default;

 private:
  std::vector<Index> vertices_;
};

double default_q(int d);
int default_kappa(Index n);

/// Fills defaults. Throws Error("params") when no edge length can be derived
/// (tau unset or zero and e unset).
Params resolve_params(const Params& user, Index n);

/// As above, but without a usable tau picks e as the median distance to the
/// fallback_rank-th neighbour, so the band [e, e/q] holds roughly B points.
Params resolve_params(const Params& user, const PointCloud& cloud);

/// ceil(B / (q^-d - 1)), clamped to [1, max(1, floor(n/8))].
Index fallback_rank(int d, double q, int B, Index n);

/// Median over points of the distance to the rank-th nearest other point.
double median_nn_distance(const PointCloud& cloud, Index rank = 1);

void write_params(std::ostream& out, const Params& params);
Params read_params(std::istream& in);

}  // namespace lapd
