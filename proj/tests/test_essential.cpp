#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"

using namespace epipose;

TEST_CASE("essential matrices carry the exact (1,1,0) spectrum") {
  for (std::uint64_t seed : {121u, 122u, 123u}) {
    const auto fixture = oracles::make_oracle_scene(seed);
    const CameraIntrinsics& k = fixture.scene.intrinsics;
    const EssentialMatrix e = essential_from_fundamental(fixture.f_gt, k, k);
    Eigen::JacobiSVD<Mat3<double>> svd(e.m);
    CHECK(svd.singularValues()(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(svd.singularValues()(1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(svd.singularValues()(2) < 1e-9);
    CHECK(e.m.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  }
}

TEST_CASE("with identity intrinsics E keeps F's null direction") {
  PortableRng rng(127);
  Mat3<double> m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = rng.normal();
  const FundamentalMatrix f = enforce_rank2(m);
  CameraIntrinsics k;  // identity
  const EssentialMatrix e = essential_from_fundamental(f, k, k);
  Eigen::JacobiSVD<Mat3<double>> svd_f(f.m, Eigen::ComputeFullV);
  const Vec3<double> null_f = svd_f.matrixV().col(2);
  CHECK((e.m * null_f).norm() < 1e-9);
}

TEST_CASE("a rank-1 matrix cannot be projected to an essential matrix") {
  FundamentalMatrix f;
  f.m.setZero();
  f.m(0, 0) = 1.0;
  CameraIntrinsics k;
  CHECK_THROWS_AS(essential_from_fundamental(f, k, k),
                  const DegenerateConfiguration&);
  EssentialMatrix e;
  e.m.setZero();
  e.m(0, 0) = 1.0;
  CHECK_THROWS_AS(decompose_essential(e), const DegenerateConfiguration&);
}

TEST_CASE("decomposition of a pure lateral-translation essential matrix") {
  EssentialMatrix e;
  e.m << 0, 0, 0, 0, 0, -1, 0, 1, 0;  // [e_x]_x, singular values (1,1,0)
  const std::array<RelativePose, 4> candidates = decompose_essential(e);
  bool found = false;
  for (const RelativePose& cand : candidates) {
    if ((cand.rotation - Mat3<double>::Identity()).norm() < 1e-9 &&
        (cand.translation - Vec3<double>{1, 0, 0}).norm() < 1e-9)
      found = true;
  }
  CHECK(found);
  // candidates come as (Ra,+t), (Ra,-t), (Rb,+t), (Rb,-t)
  CHECK((candidates[0].rotation - candidates[1].rotation).norm() < 1e-12);
  CHECK((candidates[2].rotation - candidates[3].rotation).norm() < 1e-12);
  CHECK((candidates[0].translation + candidates[1].translation).norm() <
        1e-12);
  CHECK((candidates[2].translation + candidates[3].translation).norm() <
        1e-12);
}

TEST_CASE("one candidate matches the generating pose") {
  for (std::uint64_t seed : {131u, 132u, 133u, 134u}) {
    const auto fixture = oracles::make_oracle_scene(seed);
    const CameraIntrinsics& k = fixture.scene.intrinsics;
    const EssentialMatrix e = essential_from_fundamental(fixture.f_gt, k, k);
    const std::array<RelativePose, 4> candidates = decompose_essential(e);
    double best_rot = 1e9, best_trans = 1e9;
    for (const RelativePose& cand : candidates) {
      const double dr =
          rotation_error(cand.rotation, fixture.pose_gt.rotation);
      const double dt = translation_angular_error(
          cand.translation, fixture.pose_gt.translation);
      if (dr + dt < best_rot + best_trans) {
        best_rot = dr;
        best_trans = dt;
      }
    }
    CHECK(best_rot < 1e-6);
    CHECK(best_trans < 1e-4);
  }
}

TEST_CASE("the twisted pair differs by a 180 degree turn about t") {
  const auto fixture = oracles::make_oracle_scene(137);
  const CameraIntrinsics& k = fixture.scene.intrinsics;
  const EssentialMatrix e = essential_from_fundamental(fixture.f_gt, k, k);
  const std::array<RelativePose, 4> candidates = decompose_essential(e);
  // the difference rotation must be composed as Rb * Ra^T; that equals
  // U diag(-1,-1,1) U^T whose axis is the third column of U, i.e. +-t
  const Mat3<double> twist =
      candidates[2].rotation * candidates[0].rotation.transpose();
  const Vec3<double> v = rodrigues_vector(twist);
  CHECK(v.norm() == doctest::Approx(kPi).epsilon(1e-8));
  const Vec3<double> axis = v / v.norm();
  CHECK(std::abs(axis.dot(candidates[0].translation)) ==
        doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("negating E leaves the candidate set unchanged") {
  const auto fixture = oracles::make_oracle_scene(139);
  const CameraIntrinsics& k = fixture.scene.intrinsics;
  const EssentialMatrix e = essential_from_fundamental(fixture.f_gt, k, k);
  EssentialMatrix neg;
  neg.m = -e.m;
  const auto a = decompose_essential(e);
  const auto b = decompose_essential(neg);
  for (const RelativePose& pa : a) {
    double best = 1e9;
    for (const RelativePose& pb : b) {
      best = std::min(best, (pa.rotation - pb.rotation).norm() +
                                (pa.translation - pb.translation).norm());
    }
    CHECK(best < 1e-9);
  }
}

TEST_CASE("triangulation reproduces scene points with positive depths") {
  const auto fixture = oracles::make_oracle_scene(149, 30);
  const CameraIntrinsics& k = fixture.scene.intrinsics;
  // triangulate against the metric pose so depths are in scene units
  RelativePose metric = fixture.pose_gt;
  metric.translation = fixture.scene.metric_translation();
  for (Eigen::Index i = 0; i < fixture.correspondences.size(); ++i) {
    const Triangulation tri =
        triangulate_dlt(fixture.correspondences[i], metric, k, k);
    CHECK((tri.point - fixture.scene.points3d[std::size_t(i)]).norm() <
          1e-6 * fixture.scene.points3d[std::size_t(i)].norm());
    CHECK(tri.depth1 > 0);
    CHECK(tri.depth2 > 0);
    // reprojection closes the loop
    const Vec2<double> reproj = k.project(tri.point);
    CHECK(std::abs(reproj(0) - fixture.correspondences[i].u1) < 1e-6);
    CHECK(std::abs(reproj(1) - fixture.correspondences[i].v1) < 1e-6);
  }
}

TEST_CASE("a correspondence on the baseline cannot be triangulated") {
  CameraIntrinsics k;
  k.fx = 500;
  k.fy = 500;
  k.cx = 320;
  k.cy = 240;
  RelativePose pose;
  pose.translation = Vec3<double>{0, 0, 1};  // forward: baseline = optical axis
  const Correspondence c{320, 240, 320, 240};
  try {
    const Triangulation tri = triangulate_dlt(c, pose, k, k);
    // if the SVD picks a finite representative it must still lie on the
    // baseline itself (the origin counts: both cameras see it dead centre)
    const double scale = std::max(1.0, std::abs(tri.point(2)));
    CHECK(std::abs(tri.point(0)) <= 1e-6 * scale);
    CHECK(std::abs(tri.point(1)) <= 1e-6 * scale);
  } catch (const PointAtInfinity&) {
    CHECK(true);
  }
}

TEST_CASE("cheirality voting selects the generating pose unanimously") {
  const auto fixture = oracles::make_oracle_scene(151, 50);
  const CameraIntrinsics& k = fixture.scene.intrinsics;
  const EssentialMatrix e = essential_from_fundamental(fixture.f_gt, k, k);
  const auto candidates = decompose_essential(e);
  const CheiralityResult result =
      cheirality_select(candidates, fixture.correspondences, k, k);
  CHECK(rotation_error(result.pose.rotation, fixture.pose_gt.rotation) <
        1e-6);
  CHECK(translation_angular_error(result.pose.translation,
                                  fixture.pose_gt.translation) < 1e-4);
  CHECK(result.positive_depth_counts[std::size_t(result.selected)] == 50);
  for (int j = 0; j < 4; ++j) {
    if (j == result.selected) continue;
    CHECK(result.positive_depth_counts[std::size_t(j)] < 50);
  }
  CHECK_FALSE(result.tie_broken);
}

TEST_CASE("voting works from a single correspondence") {
  const auto fixture = oracles::make_oracle_scene(157, 20);
  const CameraIntrinsics& k = fixture.scene.intrinsics;
  const EssentialMatrix e = essential_from_fundamental(fixture.f_gt, k, k);
  const auto candidates = decompose_essential(e);
  CorrespondenceSet single;
  single.push_back(fixture.correspondences[0]);
  const CheiralityResult result = cheirality_select(candidates, single, k, k);
  CHECK(result.positive_depth_counts[std::size_t(result.selected)] == 1);
}

TEST_CASE("the vote survives a minority of outliers") {
  const auto fixture = oracles::make_oracle_scene(163, 40);
  const CameraIntrinsics& k = fixture.scene.intrinsics;
  CorruptionConfig cc;
  cc.outlier_ratio = 0.2;
  cc.outlier_min_offset = 30;
  cc.seed = 164;
  const CorruptedSet corrupted = corrupt(fixture.correspondences, cc);
  const EssentialMatrix e = essential_from_fundamental(fixture.f_gt, k, k);
  const auto candidates = decompose_essential(e);
  const CheiralityResult result =
      cheirality_select(candidates, corrupted.set, k, k);
  CHECK(rotation_error(result.pose.rotation, fixture.pose_gt.rotation) <
        1e-6);
}

TEST_CASE("duplicate winners break ties toward the lowest index") {
  const auto fixture = oracles::make_oracle_scene(167, 30);
  const CameraIntrinsics& k = fixture.scene.intrinsics;
  const EssentialMatrix e = essential_from_fundamental(fixture.f_gt, k, k);
  const auto candidates = decompose_essential(e);
  const CheiralityResult baseline =
      cheirality_select(candidates, fixture.correspondences, k, k);
  std::array<RelativePose, 4> doubled = candidates;
  // plant a duplicate of the winner at index 3 (or 0 if the winner is 3)
  const int src = baseline.selected;
  const int dst = src == 3 ? 0 : 3;
  doubled[std::size_t(dst)] = candidates[std::size_t(src)];
  const CheiralityResult tied =
      cheirality_select(doubled, fixture.correspondences, k, k);
  CHECK(tied.tie_broken);
  CHECK(tied.selected == std::min(src, dst));
}

TEST_CASE("empty correspondences and all-behind candidates throw") {
  const auto fixture = oracles::make_oracle_scene(173, 20);
  const CameraIntrinsics& k = fixture.scene.intrinsics;
  const EssentialMatrix e = essential_from_fundamental(fixture.f_gt, k, k);
  const auto candidates = decompose_essential(e);
  CorrespondenceSet empty;
  CHECK_THROWS_AS(cheirality_select(candidates, empty, k, k),
                  const InsufficientData&);

  // reversing the baseline puts every triangulated point behind a camera
  RelativePose reversed = fixture.pose_gt;
  reversed.translation = -reversed.translation;
  const std::array<RelativePose, 4> behind = {reversed, reversed, reversed,
                                              reversed};
  CHECK_THROWS_AS(cheirality_select(behind, fixture.correspondences, k, k),
                  const NoValidPose&);
}
