#pragma once

#include <cstdint>
#include <vector>

#include "omnivo/eval.h"
#include "omnivo/odba.h"
#include "omnivo/synth.h"

namespace fixtures {

struct Synthetic {
  omnivo::BAProblem truth;
  std::vector<omnivo::PoseSE3> camera_to_world;
};

inline Synthetic make_synthetic(std::uint64_t seed, const omnivo::SphericalCamera& cam,
                                int frames = 8, int patches = 64, int radius = 3,
                                int points = 1500) {
  omnivo::MotionSpec spec;
  spec.n_frames = frames;
  spec.max_step = 0.2;
  spec.max_turn = 0.05;
  spec.profile = omnivo::MotionProfile::kRandomWalk;
  Synthetic s;
  s.camera_to_world = omnivo::generate_trajectory(seed, spec);
  const omnivo::Scene scene = omnivo::generate_scene(seed, points);
  s.truth = omnivo::render_tracks(scene, s.camera_to_world, cam, patches, radius);
  return s;
}

inline omnivo::Trajectory to_trajectory(const std::vector<omnivo::PoseSE3>& c2w) {
  omnivo::Trajectory t;
  for (size_t k = 0; k < c2w.size(); ++k) t.push_back(static_cast<double>(k), c2w[k]);
  return t;
}

// Camera-to-world trajectory of a problem's poses.
inline omnivo::Trajectory solved_trajectory(const omnivo::BAProblem& p) {
  omnivo::Trajectory t;
  for (const auto& [f, T] : p.poses) t.push_back(static_cast<double>(f), T.inverse());
  return t;
}

}  // namespace fixtures
