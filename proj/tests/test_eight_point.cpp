#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"

using namespace epipose;

namespace {

// recompute centroid and mean distance of the normalized points directly
void check_normalized_stats(const CorrespondenceSet& set, int which) {
  double cu = 0, cv = 0;
  const double n = double(set.size());
  for (Eigen::Index i = 0; i < set.size(); ++i) {
    cu += which == 1 ? set[i].u1 : set[i].u2;
    cv += which == 1 ? set[i].v1 : set[i].v2;
  }
  cu /= n;
  cv /= n;
  CHECK(std::abs(cu) < 1e-12);
  CHECK(std::abs(cv) < 1e-12);
  double dist = 0;
  for (Eigen::Index i = 0; i < set.size(); ++i) {
    const double u = which == 1 ? set[i].u1 : set[i].u2;
    const double v = which == 1 ? set[i].v1 : set[i].v2;
    dist += std::hypot(u - cu, v - cv);
  }
  dist /= n;
  CHECK(dist == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

}  // namespace

TEST_CASE("an already-normalized set gets the identity transform") {
  CorrespondenceSet set;
  const double s = std::sqrt(2.0);
  set.push_back({-s, 0, -s, 0});
  set.push_back({s, 0, s, 0});
  set.push_back({0, -s, 0, -s});
  set.push_back({0, s, 0, s});
  const HartleyNormalization h = hartley_normalize(set);
  CHECK((h.t1 - Mat3<double>::Identity()).norm() < 1e-12);
  CHECK((h.t2 - Mat3<double>::Identity()).norm() < 1e-12);
}

TEST_CASE("the unit square normalizes to zero centroid, sqrt(2) mean dist") {
  CorrespondenceSet set;
  set.push_back({0, 0, 0, 0});
  set.push_back({2, 0, 2, 0});
  set.push_back({0, 2, 0, 2});
  set.push_back({2, 2, 2, 2});
  const HartleyNormalization h = hartley_normalize(set);
  check_normalized_stats(h.normalized, 1);
  check_normalized_stats(h.normalized, 2);
}

TEST_CASE("normalization statistics hold for random sets") {
  PortableRng rng(79);
  CorrespondenceSet set;
  for (int i = 0; i < 20; ++i)
    set.push_back({rng.uniform(0, 640), rng.uniform(0, 480),
                   rng.uniform(0, 640), rng.uniform(0, 480)});
  const HartleyNormalization h = hartley_normalize(set);
  check_normalized_stats(h.normalized, 1);
  check_normalized_stats(h.normalized, 2);

  // the transforms reproduce the normalized coordinates
  for (Eigen::Index i = 0; i < set.size(); ++i) {
    const Vec3<double> mapped = h.t1 * set[i].hom1();
    CHECK(mapped(0) / mapped(2) ==
          doctest::Approx(h.normalized[i].u1).epsilon(1e-12));
    CHECK(mapped(1) / mapped(2) ==
          doctest::Approx(h.normalized[i].v1).epsilon(1e-12));
  }
}

TEST_CASE("degenerate normalization inputs throw") {
  CorrespondenceSet empty;
  CHECK_THROWS_AS(hartley_normalize(empty), const InsufficientData&);

  CorrespondenceSet coincident;
  for (int i = 0; i < 9; ++i) coincident.push_back({5, 5, double(i), 1});
  CHECK_THROWS_AS(hartley_normalize(coincident),
                  const DegenerateConfiguration&);
}

TEST_CASE("uniform weights recover the ground-truth F on exact data") {
  for (std::uint64_t seed : {81u, 82u, 83u}) {
    const auto fixture = oracles::make_oracle_scene(seed);
    const VecX<double> ones =
        VecX<double>::Ones(fixture.correspondences.size());
    const FundamentalMatrix f =
        weighted_eight_point(fixture.correspondences, ones);
    CHECK((f.m - fixture.f_gt.m).norm() < 1e-8);
  }
}

TEST_CASE("scaling all weights leaves the solution unchanged") {
  const auto fixture = oracles::make_oracle_scene(89);
  VecX<double> w = VecX<double>::Ones(fixture.correspondences.size());
  PortableRng rng(89);
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(0.1, 2.0);
  const FundamentalMatrix a =
      weighted_eight_point(fixture.correspondences, w);
  const VecX<double> w2 = 2.0 * w;
  const FundamentalMatrix b =
      weighted_eight_point(fixture.correspondences, w2);
  CHECK((a.m - b.m).norm() < 1e-12);
}

TEST_CASE("zero-weight outliers are excluded exactly") {
  const auto fixture = oracles::make_oracle_scene(97, 40);
  CorrespondenceSet mixed = fixture.correspondences;
  PortableRng rng(97);
  VecX<double> w = VecX<double>::Ones(mixed.size() * 2);
  for (Eigen::Index i = 0; i < fixture.correspondences.size(); ++i) {
    // one gross outlier per clean point, weighted zero
    Correspondence bad = fixture.correspondences[i];
    bad.u2 += rng.uniform(50, 200);
    bad.v2 += rng.uniform(50, 200);
    mixed.push_back(bad);
    w(fixture.correspondences.size() + i) = 0.0;
  }
  const FundamentalMatrix f = weighted_eight_point(mixed, w);
  CHECK((f.m - fixture.f_gt.m).norm() < 1e-8);
}

TEST_CASE("fewer than 8 active correspondences is insufficient") {
  const auto fixture = oracles::make_oracle_scene(101, 10);
  VecX<double> w = VecX<double>::Zero(10);
  for (int i = 0; i < 7; ++i) w(i) = 1.0;
  CHECK_THROWS_AS(weighted_eight_point(fixture.correspondences, w),
                  const InsufficientData&);

  CorrespondenceSet seven;
  for (int i = 0; i < 7; ++i) seven.push_back(fixture.correspondences[i]);
  const VecX<double> ones = VecX<double>::Ones(7);
  CHECK_THROWS_AS(weighted_eight_point(seven, ones),
                  const InsufficientData&);
}

TEST_CASE("weight vector validation") {
  const auto fixture = oracles::make_oracle_scene(103, 12);
  const VecX<double> short_w = VecX<double>::Ones(5);
  CHECK_THROWS_AS(weighted_eight_point(fixture.correspondences, short_w),
                  const InvalidInput&);
  VecX<double> negative = VecX<double>::Ones(12);
  negative(3) = -0.5;
  CHECK_THROWS_AS(weighted_eight_point(fixture.correspondences, negative),
                  const InvalidInput&);
}

TEST_CASE("rank-deficient designs are rejected") {
  // 4 distinct correspondences duplicated: only 4 independent constraints
  PortableRng rng(107);
  CorrespondenceSet set;
  for (int i = 0; i < 4; ++i) {
    const Correspondence c{rng.uniform(0, 640), rng.uniform(0, 480),
                           rng.uniform(0, 640), rng.uniform(0, 480)};
    set.push_back(c);
    set.push_back(c);
  }
  const VecX<double> ones = VecX<double>::Ones(8);
  CHECK_THROWS_AS(weighted_eight_point(set, ones),
                  const DegenerateConfiguration&);
}

TEST_CASE("solutions are canonical rank-2 matrices even on noisy data") {
  PortableRng rng(109);
  for (int trial = 0; trial < 10; ++trial) {
    const auto fixture = oracles::make_oracle_scene(110 + trial);
    CorrespondenceSet noisy = fixture.correspondences;
    for (Eigen::Index i = 0; i < noisy.size(); ++i) {
      noisy[i].u2 += rng.normal();
      noisy[i].v2 += rng.normal();
    }
    const VecX<double> ones = VecX<double>::Ones(noisy.size());
    const FundamentalMatrix f = weighted_eight_point(noisy, ones);
    CHECK(f.m.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(f.m.determinant()) < 1e-10);
  }
}
