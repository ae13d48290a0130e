#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lapd/core.hpp"
#include "lapd/datasets.hpp"

using namespace lapd;

TEST_CASE("defaults for a planar problem") {
  Params user;
  user.d = 2;
  user.tau = 0.05;
  const Params p = resolve_params(user, Index{6000});
  CHECK(*p.e == doctest::Approx(std::sqrt(2.0) * 0.05));
  CHECK(*p.e == doctest::Approx(0.0707).epsilon(1e-3));
  CHECK(*p.q == doctest::Approx(0.8));
  CHECK(*p.B == 25);
  CHECK(*p.kappa == 87);
  CHECK(*p.k == 100);
  CHECK(*p.r0 == 0.0);
  CHECK(*p.delta == 1e-8);
  CHECK_FALSE(p.eta.has_value());
  CHECK_FALSE(p.m.has_value());
}

TEST_CASE("default q for curves") {
  Params user;
  user.d = 1;
  user.tau = 0.1;
  CHECK(*resolve_params(user, Index{100}).q == doctest::Approx(1.0 / 1.10));
}

TEST_CASE("user values are kept") {
  Params user;
  user.d = 2;
  user.e = 0.3;
  user.q = 0.5;
  user.kappa = 7;
  const Params p = resolve_params(user, Index{50});
  CHECK(*p.e == 0.3);
  CHECK(*p.q == 0.5);
  CHECK(*p.kappa == 7);
}

TEST_CASE("no edge length without tau or e") {
  Params user;
  user.d = 2;
  CHECK_THROWS_AS(resolve_params(user, Index{1000}), Error);
  user.tau = 0.0;
  CHECK_THROWS_AS(resolve_params(user, Index{1000}), Error);
}

TEST_CASE("invalid parameters are rejected") {
  Params user;
  user.tau = 0.1;
  CHECK_THROWS_AS(resolve_params(user, Index{100}), Error);  // d = 0
  user.d = kMaxIntrinsicDim + 1;
  CHECK_THROWS_AS(resolve_params(user, Index{100}), Error);
  user.d = 2;
  user.q = 1.5;
  CHECK_THROWS_AS(resolve_params(user, Index{100}), Error);
  user.q.reset();
  user.B = 1;
  CHECK_THROWS_AS(resolve_params(user, Index{100}), Error);
}

TEST_CASE("fallback edge length is the median rank-th neighbour distance") {
  ShapeSpec spec;
  spec.kind = ShapeKind::kHypercubes;
  spec.d = 2;
  spec.D = 3;
  spec.n = 1000;
  spec.seed = 5;
  const PointCloud cloud = generate(spec);

  Params user;
  user.d = 2;
  user.tau = 0.0;
  const Params p = resolve_params(user, cloud);
  const Index rank = fallback_rank(2, default_q(2), 25, cloud.size());
  CHECK(rank == 45);

  std::vector<double> kth;
  for (Index i = 0; i < cloud.size(); ++i) {
    std::vector<double> row;
    for (Index j = 0; j < cloud.size(); ++j)
      if (j != i) row.push_back(cloud.distance(i, j));
    std::sort(row.begin(), row.end());
    kth.push_back(row[rank - 1]);
  }
  std::sort(kth.begin(), kth.end());
  const double median = 0.5 * (kth[499] + kth[500]);
  CHECK(*p.e == doctest::Approx(median).epsilon(1e-12));
  CHECK(median_nn_distance(cloud) > 0.0);
}

TEST_CASE("fallback rank respects the locality cap") {
  CHECK(fallback_rank(1, default_q(1), 25, 2000) == 250);
  CHECK(fallback_rank(1, default_q(1), 25, 400) == 50);
  CHECK(fallback_rank(2, 0.5, 25, 3) == 1);
}

TEST_CASE("params round-trip through text") {
  Params p;
  p.d = 2;
  p.tau = 0.1;
  p.e = 1.0 / 3.0;
  p.q = 0.8;
  p.B = 30;
  p.kappa = 12;
  p.m = 3;
  p.weight_mode = WeightMode::kTwoSided;
  p.delta = 1e-9;
  p.nu = 0.02;
  p.seed = 99;
  std::stringstream ss;
  write_params(ss, p);
  CHECK(read_params(ss) == p);

  std::stringstream text("# comment\nd = 1\ntau = 0.2  # inline\neta = auto\nm = auto\n");
  const Params q = read_params(text);
  CHECK(q.d == 1);
  CHECK(*q.tau == 0.2);
  CHECK_FALSE(q.eta);
  CHECK_FALSE(q.m);

  std::stringstream bad("d = two\n");
  CHECK_THROWS_AS(read_params(bad), Error);
  std::stringstream unknown("colour = red\n");
  CHECK_THROWS_AS(read_params(unknown), Error);
}

TEST_CASE("simplex vertices are canonical") {
  const Simplex s({5, 2, 9});
  CHECK(s[0] == 2);
  CHECK(s[2] == 9);
  CHECK_THROWS_AS(Simplex({1, 1, 3}), Error);
}

TEST_CASE("weight mode names") {
  CHECK(parse_weight_mode("two-sided") == WeightMode::kTwoSided);
  CHECK(parse_weight_mode(to_string(WeightMode::kOneSided)) == WeightMode::kOneSided);
  CHECK_THROWS_AS(parse_weight_mode("sideways"), Error);
}

TEST_CASE("errors carry their stage") {
  try {
    Params user;
    user.d = 2;
    resolve_params(user, Index{10});
    FAIL("expected an error");
  } catch (const Error& ex) {
    CHECK(ex.stage() == "params");
  }
}
