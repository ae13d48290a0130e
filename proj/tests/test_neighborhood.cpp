#include <random>

#include "doctest.h"
#include "lapd/neighborhood.hpp"
#include "oracles.hpp"

using namespace lapd;

namespace {

PointCloud on_line(std::initializer_list<double> ts) {
  Matrix m(static_cast<Eigen::Index>(ts.size()), 2);
  Eigen::Index r = 0;
  for (double t : ts) {
    m(r, 0) = t;
    m(r, 1) = 0.0;
    ++r;
  }
  return PointCloud(m);
}

PointCloud random_cloud(Index n, int D, std::uint64_t seed, bool lattice = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> grid(0, 4);
  Matrix m(n, D);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = lattice ? 0.25 * grid(rng) : u(rng);
  return PointCloud(m);
}

}  // namespace

TEST_CASE("nearest annular neighbour on a line") {
  const auto g = build_annular_graph(on_line({0.0, 1.0, 2.0}), 0.5, 1);
  CHECK(g.neighbors[0] == std::vector<Index>{1});
  CHECK(g.neighbors[1] == std::vector<Index>{0});
}

TEST_CASE("points inside the inner radius are skipped") {
  const auto g = build_annular_graph(on_line({0.0, 0.1, 1.0}), 0.5, 2);
  CHECK(g.neighbors[0] == std::vector<Index>{2});
}

TEST_CASE("boundary points at exactly e are excluded") {
  const auto g = build_annular_graph(on_line({0.0, 0.5, 1.5}), 0.5, 2);
  CHECK(g.neighbors[0] == std::vector<Index>{2});
}

TEST_CASE("annular graph matches the exhaustive scan") {
  for (std::uint64_t seed : {1U, 2U, 3U}) {
    const auto cloud = random_cloud(200, 3, seed);
    const auto g = build_annular_graph(cloud, 0.2, 10);
    CHECK(g.neighbors == oracle::annular_knn(cloud, 0.2, 10));
  }
}

TEST_CASE("distance ties resolve by index") {
  // Many coincident and equidistant points on a coarse lattice.
  const auto cloud = random_cloud(300, 2, 7, true);
  const auto g = build_annular_graph(cloud, 0.2, 6);
  CHECK(g.neighbors == oracle::annular_knn(cloud, 0.2, 6));
}

TEST_CASE("annulus and cardinality hold for every point") {
  const auto cloud = random_cloud(150, 4, 21);
  const auto g = build_annular_graph(cloud, 0.3, 8);
  for (Index i = 0; i < cloud.size(); ++i) {
    CHECK(g.neighbors[i].size() <= 8);
    for (Index j : g.neighbors[i]) {
      CHECK(j != i);
      CHECK(cloud.distance(i, j) > 0.3);
    }
  }
}

TEST_CASE("k-d tree queries match sorting") {
  const auto cloud = random_cloud(500, 5, 4);
  const KdTree tree(cloud.coords, 4);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> q(5);
    for (double& v : q) v = u(rng);
    std::vector<Neighbor> all;
    for (Index i = 0; i < cloud.size(); ++i) {
      double s = 0.0;
      for (int c = 0; c < 5; ++c) s += (cloud.coords(i, c) - q[c]) * (cloud.coords(i, c) - q[c]);
      all.push_back({s, i});
    }
    std::sort(all.begin(), all.end());
    all.resize(7);
    CHECK(tree.nearest(q, 7) == all);
  }
}
