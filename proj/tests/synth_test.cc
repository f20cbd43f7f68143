#include "omnivo/synth.h"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.h"

namespace omnivo {
namespace {

const SphericalCamera kCam(1920, 960);

TEST(Scene, DeterministicAndBounded) {
  const Scene a = generate_scene(3, 500);
  const Scene b = generate_scene(3, 500);
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(a.points, generate_scene(4, 500).points);
  for (const Point3H& p : a.points) {
    EXPECT_TRUE(a.bounds.contains(p.head<3>()));
    EXPECT_EQ(p.w(), 1.0);
  }
  EXPECT_THROW(generate_scene(1, 0), Error);
}

TEST(Scene, UniformMean) {
  Bounds box;
  box.min = Eigen::Vector3d(-1, 2, 10);
  box.max = Eigen::Vector3d(3, 4, 20);
  const Scene s = generate_scene(21, 10000, box);
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const Point3H& p : s.points) mean += p.head<3>();
  mean /= 10000.0;
  const Eigen::Vector3d extent = box.max - box.min;
  for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(mean(k) - box.center()(k)), 0.05 * extent(k));
}

TEST(Trajectory, LineProfile) {
  MotionSpec spec{5, 0.1, 0.0, MotionProfile::kLine};
  const auto poses = generate_trajectory(0, spec);
  ASSERT_EQ(poses.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(poses[k].rotation(), Eigen::Matrix3d::Identity());
    EXPECT_NEAR((poses[k].translation() - Eigen::Vector3d(0, 0, 0.1 * k)).norm(), 0, 1e-15);
  }
}

TEST(Trajectory, OrbitSweep) {
  MotionSpec spec{13, 0.2, kPi / 12, MotionProfile::kOrbit};
  const auto poses = generate_trajectory(0, spec);
  EXPECT_EQ(poses.front(), PoseSE3::identity());
  const PoseSE3 rel = poses.back() * poses.front().inverse();
  EXPECT_NEAR(rotation_angle(rel.rotation()), kPi, 1e-9);
  for (size_t k = 1; k < poses.size(); ++k) {
    EXPECT_NEAR((poses[k].translation() - poses[k - 1].translation()).norm(), 0.2, 1e-12);
  }
  // The camera keeps facing the orbit center.
  const Eigen::Vector3d center(0, 0, 0.2 / (2 * std::sin(kPi / 24)));
  for (const PoseSE3& T : poses) {
    const Eigen::Vector3d local = T.inverse().act(center);
    EXPECT_NEAR(local.normalized().z(), 1.0, 1e-12);
  }
  EXPECT_THROW(generate_trajectory(0, {5, 0.1, 0.0, MotionProfile::kOrbit}), Error);
}

TEST(Trajectory, ArcAndBounds) {
  for (MotionProfile profile : {MotionProfile::kArc, MotionProfile::kRandomWalk}) {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      MotionSpec spec{12, 0.15, 0.08, profile};
      const auto poses = generate_trajectory(seed, spec);
      EXPECT_EQ(poses.front(), PoseSE3::identity());
      for (size_t k = 1; k < poses.size(); ++k) {
        const PoseSE3 rel = poses[k - 1].inverse() * poses[k];
        ASSERT_LE((poses[k].translation() - poses[k - 1].translation()).norm(), 0.15 + 1e-12);
        ASSERT_LE(rotation_angle(rel.rotation()), 0.08 + 1e-12);
      }
      if (profile == MotionProfile::kArc) break;
    }
  }
  EXPECT_EQ(generate_trajectory(5, {6, 0.1, 0.1, MotionProfile::kRandomWalk})[3],
            generate_trajectory(5, {6, 0.1, 0.1, MotionProfile::kRandomWalk})[3]);
  EXPECT_THROW(generate_trajectory(0, {5, 0.0, 0.1, MotionProfile::kLine}), Error);
  EXPECT_EQ(parse_motion_profile("random-walk"), MotionProfile::kRandomWalk);
  EXPECT_THROW(parse_motion_profile("spiral"), Error);
}

BAProblem rendered(std::uint64_t seed, int frames, int patches, int radius,
                   std::vector<PoseSE3>* gt = nullptr) {
  const Scene scene = generate_scene(seed, 1200);
  const auto poses = generate_trajectory(seed, {frames, 0.2, 0.05, MotionProfile::kRandomWalk});
  if (gt) *gt = poses;
  return render_tracks(scene, poses, kCam, patches, radius);
}

TEST(RenderTracks, ZeroCostAtGroundTruth) {
  const BAProblem p = rendered(1, 6, 40, 3);
  EXPECT_LT(evaluate_cost(p, kCam), 1e-18);
  for (const auto& [e, o] : p.observations) EXPECT_EQ(o.weight, Eigen::Vector2d::Ones());
  EXPECT_EQ(p.anchors, (std::set<FrameId>{0, 1}));
  EXPECT_NO_THROW(p.validate());
}

TEST(RenderTracks, EdgeCountMatchesEnumeration) {
  for (int frames : {2, 5, 8}) {
    for (int r : {1, 2, 3, 4}) {
      const BAProblem p = rendered(2, frames, 16, r);
      std::vector<int> ids;
      for (int f = 0; f < frames; ++f) ids.push_back(f);
      EXPECT_EQ(p.graph.edges().size(), 16 * oracle::radius_pairs(ids, r).size());
    }
  }
}

TEST(RenderTracks, CentersRoundTripToScenePoints) {
  std::vector<PoseSE3> gt;
  const Scene scene = generate_scene(3, 1200);
  gt = generate_trajectory(3, {5, 0.2, 0.05, MotionProfile::kRandomWalk});
  const BAProblem p = render_tracks(scene, gt, kCam, 30, 3);
  for (const auto& [id, patch] : p.graph.patches()) {
    const Eigen::Vector3d Xc = unproject(patch.center, patch.inv_depth, kCam).head<3>();
    const Eigen::Vector3d Xw = gt[patch.source_frame].act(Xc);
    double best = 1e9;
    for (const Point3H& q : scene.points) best = std::min(best, (q.head<3>() - Xw).norm());
    EXPECT_LT(best, 1e-9);
  }
}

TEST(RenderTracks, SpreadAndVisibility) {
  const BAProblem p = rendered(4, 3, 50, 3);
  for (const auto& [id, patch] : p.graph.patches()) {
    const double phi = pixel_to_angles(patch.center, kCam).phi;
    EXPECT_LE(std::abs(phi), 75.0 * kPi / 180 + 1e-12);
    EXPECT_GE(1.0 / patch.inv_depth.value, 0.1);
  }
  try {
    rendered(5, 3, 5000, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientVisibility);
  }
}

TEST(Perturb, ZeroSigmaIsIdentity) {
  const BAProblem p = rendered(6, 5, 20, 3);
  const BAProblem q = perturb(p, {}, 99, kCam);
  EXPECT_EQ(p.poses, q.poses);
  EXPECT_EQ(p.graph.edges(), q.graph.edges());
  for (const auto& [id, patch] : p.graph.patches()) {
    EXPECT_EQ(patch.inv_depth.value, q.graph.patch(id).inv_depth.value);
  }
  for (const auto& [e, o] : p.observations) {
    EXPECT_EQ(o.target, q.observations.at(e).target);
    EXPECT_EQ(o.weight, q.observations.at(e).weight);
  }
}

TEST(Perturb, NoiseModel) {
  const BAProblem p = rendered(7, 5, 20, 3);
  const BAProblem q = perturb(p, {0.05, 0.05, 0.1, 0.5}, 1, kCam);
  EXPECT_EQ(q.poses.at(0), p.poses.at(0));
  EXPECT_EQ(q.poses.at(1), p.poses.at(1));
  for (FrameId f = 2; f < 5; ++f) {
    EXPECT_NE(q.poses.at(f), p.poses.at(f));
    const Vector6d xi = log_se3(q.poses.at(f) * p.poses.at(f).inverse()).vector();
    EXPECT_LE(xi.norm(), 0.05 + 1e-9);
  }
  for (const auto& [e, o] : q.observations) {
    EXPECT_EQ(o.weight, Eigen::Vector2d(4, 4));
    EXPECT_GE(o.target.u, 0);
    EXPECT_LT(o.target.u, 1920);
  }
  const BAProblem r = perturb(p, {0.05, 0.05, 0.1, 0.5}, 1, kCam);
  EXPECT_EQ(q.poses, r.poses);
  EXPECT_THROW(perturb(p, {-1, 0, 0, 0}, 1, kCam), Error);
}

}  // namespace
}  // namespace omnivo
