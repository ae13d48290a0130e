#include "lapd/datasets.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace lapd {

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kHypercubes: return "hypercubes";
    case ShapeKind::kSpheres: return "spheres";
    case ShapeKind::kDollarSign: return "dollar_sign";
    case ShapeKind::kThreePlanes: return "three_planes";
  }
  return "?";
}

ShapeKind parse_shape_kind(const std::string& text) {
  if (text == "hypercubes") return ShapeKind::kHypercubes;
  if (text == "spheres") return ShapeKind::kSpheres;
  if (text == "dollar_sign") return ShapeKind::kDollarSign;
  if (text == "three_planes") return ShapeKind::kThreePlanes;
  throw Error("datasets", "unknown shape kind '" + text + "'");
}

void validate(const ShapeSpec& spec) {
  if (spec.d < 1) throw Error("datasets", "d must be positive");
  if (spec.D <= spec.d) throw Error("datasets", "ambient dimension D must exceed d");
  if (spec.n < static_cast<Index>(2 * (spec.d + 2)))
    throw Error("datasets", "n must be at least 2(d+2)");
  if (!(spec.theta > 0.0 && spec.theta <= kHalfPi))
    throw Error("datasets", "theta must lie in (0, pi/2]");
  if (!(spec.sigma >= 0.0)) throw Error("datasets", "sigma must be non-negative");
  if (spec.kind == ShapeKind::kDollarSign && spec.d != 1)
    throw Error("datasets", "dollar_sign requires d = 1");
  if (spec.kind == ShapeKind::kThreePlanes && spec.d != 2)
    throw Error("datasets", "three_planes requires d = 2");
  if (spec.kind == ShapeKind::kThreePlanes && spec.D < 3)
    throw Error("datasets", "three_planes requires D >= 3");
}

namespace {

using Vec = Eigen::VectorXd;

/// A clean sample together with an orthonormal basis of the D - d directions
/// normal to its structure.
struct Sample {
  Vec point;
  std::vector<Vec> normals;
};

Vec unit(int D, int axis) {
  Vec v = Vec::Zero(D);
  v[axis] = 1.0;
  return v;
}

/// Normal directions e_from, ..., e_{D-1}, appended after any explicit ones.
void append_axes(std::vector<Vec>& normals, int D, int from) {
  for (int a = from; a < D; ++a) normals.push_back(unit(D, a));
}

class Generator {
 public:
  explicit Generator(const ShapeSpec& spec) : spec_(spec), rng_(spec.seed) {}

  PointCloud run() {
    const int structures = spec_.kind == ShapeKind::kThreePlanes ? 3 : 2;
    Matrix coords(spec_.n, spec_.D);
    std::vector<int> labels(spec_.n);
    const double half_width =
        std::sqrt(3.0) * spec_.sigma / std::sqrt(static_cast<double>(spec_.D - spec_.d));
    std::uniform_real_distribution<double> noise(-half_width, half_width);

    Index row = 0;
    for (int s = 0; s < structures; ++s) {
      const Index count = spec_.n / structures + (static_cast<Index>(s) < spec_.n % structures ? 1 : 0);
      for (Index c = 0; c < count; ++c, ++row) {
        Sample sample = draw(s);
        if (spec_.sigma > 0.0)
          for (const Vec& nrm : sample.normals) sample.point += noise(rng_) * nrm;
        coords.row(row) = sample.point.transpose();
        labels[row] = s;
      }
    }
    return PointCloud(std::move(coords), std::move(labels));
  }

 private:
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Sample draw(int structure) {
    switch (spec_.kind) {
      case ShapeKind::kHypercubes: return hypercube(structure);
      case ShapeKind::kSpheres: return sphere(structure);
      case ShapeKind::kDollarSign: return dollar(structure);
      case ShapeKind::kThreePlanes: return plane(structure);
    }
    throw Error("datasets", "unreachable shape kind");
  }

  // Cube 0 is [0,1]^d on e_0..e_{d-1}. Cube 1 shares the face u_{d-1} = 0 and
  // replaces e_{d-1} by cos(theta) e_{d-1} + sin(theta) e_d.
  Sample hypercube(int structure) {
    const int d = spec_.d, D = spec_.D;
    Sample s{Vec::Zero(D), {}};
    for (int k = 0; k < d - 1; ++k) s.point[k] = uniform(0.0, 1.0);
    const double t = uniform(0.0, 1.0);
    if (structure == 0) {
      s.point[d - 1] = t;
      append_axes(s.normals, D, d);
    } else {
      const double c = std::cos(spec_.theta), sn = std::sin(spec_.theta);
      s.point[d - 1] = t * c;
      s.point[d] = t * sn;
      Vec n0 = Vec::Zero(D);
      n0[d - 1] = -sn;
      n0[d] = c;
      s.normals.push_back(std::move(n0));
      append_axes(s.normals, D, d + 1);
    }
    return s;
  }

  Sample sphere(int structure) {
    const int d = spec_.d, D = spec_.D;
    std::normal_distribution<double> gauss;
    Vec dir = Vec::Zero(D);
    double norm = 0.0;
    while (norm < 1e-12) {
      for (int k = 0; k <= d; ++k) dir[k] = gauss(rng_);
      norm = dir.norm();
    }
    dir /= norm;
    Sample s{dir, {dir}};
    s.point[0] += structure == 0 ? -0.5 : 0.5;
    append_axes(s.normals, D, d + 1);
    return s;
  }

  // S-curve: upper arc centred (0, 1/2) from angle 0 through 3pi/2, lower arc
  // centred (0, -1/2) from pi/2 clockwise to -pi; the segment is x = 0, |y| <= 5/4.
  Sample dollar(int structure) {
    const int D = spec_.D;
    Sample s{Vec::Zero(D), {}};
    Vec normal = Vec::Zero(D);
    if (structure == 0) {
      constexpr double arc = 1.5 * kPi;  // angular length of each arc
      const double u = uniform(0.0, 2.0 * arc);
      double cy, phi;
      if (u < arc) {
        cy = 0.5;
        phi = u;
      } else {
        cy = -0.5;
        phi = kHalfPi - (u - arc);
      }
      s.point[0] = 0.5 * std::cos(phi);
      s.point[1] = cy + 0.5 * std::sin(phi);
      normal[0] = std::cos(phi);
      normal[1] = std::sin(phi);
    } else {
      s.point[1] = uniform(-1.25, 1.25);
      normal[0] = 1.0;
    }
    s.normals.push_back(std::move(normal));
    append_axes(s.normals, D, 2);
    return s;
  }

  Sample plane(int structure) {
    const int D = spec_.D;
    static const double angles[3] = {0.0, kHalfPi, kPi / 5.0};
    const double a = angles[structure];
    const double u = uniform(-0.5, 0.5), v = uniform(-0.5, 0.5);
    Sample s{Vec::Zero(D), {}};
    s.point[0] = u;
    s.point[1] = v * std::cos(a);
    s.point[2] = v * std::sin(a);
    Vec n0 = Vec::Zero(D);
    n0[1] = -std::sin(a);
    n0[2] = std::cos(a);
    s.normals.push_back(std::move(n0));
    append_axes(s.normals, D, 3);
    return s;
  }

  ShapeSpec spec_;
  std::mt19937_64 rng_;
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_field(const std::string& text, std::size_t line) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  if (first < last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last)
    throw Error("datasets", "non-numeric field '" + text + "' on line " + std::to_string(line));
  return value;
}

}  // namespace

PointCloud generate(const ShapeSpec& spec) {
  validate(spec);
  return Generator(spec).run();
}

PointCloud load_csv(const std::filesystem::path& points, const std::filesystem::path& labels) {
  std::ifstream in(points);
  if (!in) throw Error("datasets", "cannot open " + points.string());
  std::vector<double> values;
  std::size_t width = 0, rows = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t fields = 0;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      values.push_back(parse_field(field, line_no));
      ++fields;
    }
    if (rows == 0) width = fields;
    else if (fields != width)
      throw Error("datasets", "ragged row " + std::to_string(line_no) + " in " + points.string());
    ++rows;
  }
  if (rows == 0) throw Error("datasets", "no points in " + points.string());

  Matrix coords(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
  std::copy(values.begin(), values.end(), coords.data());
  std::optional<std::vector<int>> truth;
  if (!labels.empty()) {
    truth = load_labels(labels);
    if (truth->size() != rows)
      throw Error("datasets", "label file has " + std::to_string(truth->size()) + " entries for " +
                                  std::to_string(rows) + " points");
  }
  return PointCloud(std::move(coords), std::move(truth));
}

void save_csv(const PointCloud& cloud, const std::filesystem::path& points) {
  std::ofstream out(points, std::ios::binary);
  if (!out) throw Error("datasets", "cannot write " + points.string());
  for (Index i = 0; i < cloud.size(); ++i) {
    for (int c = 0; c < cloud.dim(); ++c) {
      if (c) out << ',';
      out << format_double(cloud.coords(i, c));
    }
    out << '\n';
  }
  if (!out) throw Error("datasets", "write failed for " + points.string());
}

std::vector<int> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("datasets", "cannot open " + path.string());
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int v = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || ptr != line.data() + line.size())
      throw Error("datasets", "bad label '" + line + "' on line " + std::to_string(line_no));
    labels.push_back(v);
  }
  return labels;
}

void save_labels(const std::vector<int>& labels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("datasets", "cannot write " + path.string());
  for (int v : labels) out << v << '\n';
  if (!out) throw Error("datasets", "write failed for " + path.string());
}

}  // namespace lapd
