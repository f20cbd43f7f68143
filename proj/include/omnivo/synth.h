#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omnivo/lie.h"
#include "omnivo/odba.h"
#include "omnivo/sphere_camera.h"

namespace omnivo {

// Synthetic worlds with exact patch predictions standing in for a learned
// flow network.

struct Bounds {
  Eigen::Vector3d min = Eigen::Vector3d::Constant(-5.0);
  Eigen::Vector3d max = Eigen::Vector3d::Constant(5.0);

  bool contains(const Eigen::Vector3d& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  Eigen::Vector3d center() const { return 0.5 * (min + max); }
};

struct Scene {
  std::vector<Point3H> points;
  std::uint64_t rng_seed = 0;
  Bounds bounds;
};

// Points uniform in `bounds`, deterministic in the seed.
// Throws InvalidArgument when n_points < 1 or the box is empty.
Scene generate_scene(std::uint64_t seed, int n_points, const Bounds& bounds = {});

enum class MotionProfile { kLine, kArc, kOrbit, kRandomWalk };

const char* to_string(MotionProfile p);
// Accepts line, arc, orbit, random-walk. Throws InvalidArgument.
MotionProfile parse_motion_profile(const std::string& name);

struct MotionSpec {
  int n_frames = 8;
  double max_step = 0.1;   // scene units per frame
  double max_turn = 0.05;  // radians per frame
  MotionProfile profile = MotionProfile::kRandomWalk;
};

// Camera-to-world poses, the first being identity. Consecutive poses differ
// by at most max_step in position and max_turn in rotation.
//   line         steps of max_step along +z, no rotation
//   arc          forward steps of max_step while yawing by max_turn
//   orbit        circles a point ahead of the first camera, facing it, with
//                chord max_step and yaw max_turn per frame
//   random-walk  random body-frame steps and turns within the bounds
std::vector<PoseSE3> generate_trajectory(std::uint64_t seed, const MotionSpec& spec);

struct RenderOptions {
  double min_range = 0.1;
  double max_latitude = 75.0 * kPi / 180.0;
};

// Builds a bundle-adjustment problem at ground truth. Each frame picks
// n_patches scene points that are visible (range and latitude limits) in it
// and in every frame within the radius, spread by farthest-point selection in
// the image. Depths are the true inverse ranges and every prediction is the
// exact reprojection, so the cost at ground truth is zero. Poses in the
// returned problem map world to camera; the two oldest frames are anchored.
// Throws InsufficientVisibility.
BAProblem render_tracks(const Scene& scene, const std::vector<PoseSE3>& camera_to_world,
                        const SphericalCamera& cam, int n_patches, int radius,
                        const RenderOptions& options = {});

struct PerturbOptions {
  double pose_sigma = 0.0;     // twist units, per component
  double pose_max_norm = 0.0;  // clips ||xi|| when positive
  double depth_sigma = 0.0;    // log-normal, relative
  double pixel_sigma = 0.0;    // pixels per axis
};

// Free poses become exp(xi) * T, depths d * exp(n), predictions p* + noise
// with the seam wrapped. With pixel noise the weights become 1 / sigma^2.
// Anchored poses are never touched and zero sigmas leave the problem
// unchanged bit for bit.
BAProblem perturb(const BAProblem& problem, const PerturbOptions& options,
                  std::uint64_t seed, const SphericalCamera& cam);

}  // namespace omnivo
