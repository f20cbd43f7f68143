#include "omnivo/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace omnivo {

Scene generate_scene(std::uint64_t seed, int n_points, const Bounds& bounds) {
  if (n_points < 1) throw Error(ErrorCode::kInvalidArgument, "scene needs at least one point");
  if (!(bounds.min.array() < bounds.max.array()).all()) {
    throw Error(ErrorCode::kInvalidArgument, "scene bounds are empty");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Scene scene;
  scene.rng_seed = seed;
  scene.bounds = bounds;
  scene.points.reserve(static_cast<size_t>(n_points));
  const Eigen::Vector3d extent = bounds.max - bounds.min;
  for (int i = 0; i < n_points; ++i) {
    const Eigen::Vector3d r(unit(rng), unit(rng), unit(rng));
    scene.points.push_back(homogeneous(bounds.min + r.cwiseProduct(extent)));
  }
  return scene;
}

const char* to_string(MotionProfile p) {
  switch (p) {
    case MotionProfile::kLine: return "line";
    case MotionProfile::kArc: return "arc";
    case MotionProfile::kOrbit: return "orbit";
    case MotionProfile::kRandomWalk: return "random-walk";
  }
  return "unknown";
}

MotionProfile parse_motion_profile(const std::string& name) {
  if (name == "line") return MotionProfile::kLine;
  if (name == "arc") return MotionProfile::kArc;
  if (name == "orbit") return MotionProfile::kOrbit;
  if (name == "random-walk") return MotionProfile::kRandomWalk;
  throw Error(ErrorCode::kInvalidArgument, "unknown motion profile '" + name + "'");
}

namespace {

Eigen::Matrix3d yaw(double angle) {
  return exp_so3(Eigen::Vector3d(0.0, angle, 0.0));
}

Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector3d d;
  do {
    d = Eigen::Vector3d(n(rng), n(rng), n(rng));
  } while (d.norm() < 1e-6);
  return d.normalized();
}

}  // namespace

std::vector<PoseSE3> generate_trajectory(std::uint64_t seed, const MotionSpec& spec) {
  if (spec.n_frames < 1) throw Error(ErrorCode::kInvalidArgument, "n_frames must be >= 1");
  if (!(spec.max_step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "max_step must be > 0");
  if (!(spec.max_turn >= 0.0) || spec.max_turn >= kPi) {
    throw Error(ErrorCode::kInvalidArgument, "max_turn must be in [0, pi)");
  }
  if (spec.profile == MotionProfile::kOrbit && !(spec.max_turn > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "orbit profile needs max_turn > 0");
  }

  std::vector<PoseSE3> poses;
  poses.reserve(static_cast<size_t>(spec.n_frames));
  switch (spec.profile) {
    case MotionProfile::kLine:
      for (int k = 0; k < spec.n_frames; ++k) {
        poses.emplace_back(Eigen::Matrix3d::Identity(),
                           Eigen::Vector3d(0.0, 0.0, k * spec.max_step));
      }
      break;
    case MotionProfile::kArc: {
      const PoseSE3 step(yaw(spec.max_turn), Eigen::Vector3d(0.0, 0.0, spec.max_step));
      PoseSE3 T;
      for (int k = 0; k < spec.n_frames; ++k) {
        poses.push_back(T);
        T = T * step;
      }
      break;
    }
    case MotionProfile::kOrbit: {
      const double radius = spec.max_step / (2.0 * std::sin(0.5 * spec.max_turn));
      const Eigen::Vector3d center(0.0, 0.0, radius);
      for (int k = 0; k < spec.n_frames; ++k) {
        const Eigen::Matrix3d R = yaw(k * spec.max_turn);
        poses.emplace_back(R, center - R * center);
      }
      break;
    }
    case MotionProfile::kRandomWalk: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      PoseSE3 T;
      for (int k = 0; k < spec.n_frames; ++k) {
        poses.push_back(T);
        const Eigen::Vector3d t = (0.5 + 0.5 * unit(rng)) * spec.max_step * random_unit(rng);
        const Eigen::Vector3d w = unit(rng) * spec.max_turn * random_unit(rng);
        T = T * PoseSE3(exp_so3(w), t);
      }
      break;
    }
  }
  return poses;
}

namespace {

struct Candidate {
  int point = 0;
  PixelCoord pixel;
  double range = 0.0;
};

bool visible(const Eigen::Vector3d& Xc, const RenderOptions& options) {
  const double range = Xc.norm();
  if (range < options.min_range) return false;
  const double phi = std::asin(std::clamp(-Xc.y() / range, -1.0, 1.0));
  return std::abs(phi) <= options.max_latitude &&
         classify_point(Xc) == PointStatus::kOk;
}

// Greedy farthest-point subset of the candidates in image space, with the
// horizontal distance measured across the seam.
std::vector<Candidate> farthest_points(const std::vector<Candidate>& candidates, int n,
                                       const SphericalCamera& cam) {
  std::vector<Candidate> chosen;
  std::vector<double> dist(candidates.size(), std::numeric_limits<double>::infinity());
  std::vector<bool> taken(candidates.size(), false);
  size_t next = 0;
  for (int k = 0; k < n; ++k) {
    taken[next] = true;
    chosen.push_back(candidates[next]);
    const PixelCoord& c = candidates[next].pixel;
    double best = -1.0;
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (taken[i]) continue;
      const double du = wrap_u_difference(candidates[i].pixel.u - c.u, cam);
      const double dv = candidates[i].pixel.v - c.v;
      dist[i] = std::min(dist[i], du * du + dv * dv);
      if (dist[i] > best) {
        best = dist[i];
        next = i;
      }
    }
  }
  return chosen;
}

}  // namespace

BAProblem render_tracks(const Scene& scene, const std::vector<PoseSE3>& camera_to_world,
                        const SphericalCamera& cam, int n_patches, int radius,
                        const RenderOptions& options) {
  if (camera_to_world.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "at least two frames are required");
  }
  const int n_frames = static_cast<int>(camera_to_world.size());
  std::vector<PoseSE3> w2c;
  w2c.reserve(camera_to_world.size());
  for (const PoseSE3& T : camera_to_world) w2c.push_back(T.inverse());

  BAProblem problem;
  problem.graph = PatchGraph(radius, n_patches);
  for (int f = 0; f < n_frames; ++f) {
    std::vector<Candidate> candidates;
    for (size_t p = 0; p < scene.points.size(); ++p) {
      const Eigen::Vector3d Xw = scene.points[p].head<3>();
      const Eigen::Vector3d Xc = w2c[static_cast<size_t>(f)].act(Xw);
      if (!visible(Xc, options)) continue;
      bool everywhere = true;
      for (int j = std::max(0, f - radius + 1); j < std::min(n_frames, f + radius) && everywhere;
           ++j) {
        if (j != f) everywhere = visible(w2c[static_cast<size_t>(j)].act(Xw), options);
      }
      if (!everywhere) continue;
      candidates.push_back({static_cast<int>(p), project(Xc, cam), Xc.norm()});
    }
    if (static_cast<int>(candidates.size()) < n_patches) {
      throw Error(ErrorCode::kInsufficientVisibility,
                  "frame " + std::to_string(f) + " sees " + std::to_string(candidates.size()) +
                      " usable points, " + std::to_string(n_patches) + " needed");
    }
    const std::vector<Candidate> chosen = farthest_points(candidates, n_patches, cam);
    std::vector<PixelCoord> centers;
    centers.reserve(chosen.size());
    for (const Candidate& c : chosen) centers.push_back(c.pixel);
    const std::vector<PatchId> ids = problem.graph.add_frame(f, centers);
    for (size_t k = 0; k < ids.size(); ++k) {
      problem.graph.set_inv_depth(ids[k], InverseDepth(1.0 / chosen[k].range));
    }
    problem.poses[f] = w2c[static_cast<size_t>(f)];
  }

  for (const Edge& e : problem.graph.edges()) {
    const Patch& patch = problem.graph.patch(e.patch);
    Observation obs;
    obs.target = reproject_patch(patch, problem.poses.at(patch.source_frame),
                                 problem.poses.at(e.target_frame), cam);
    problem.observations.emplace(e, obs);
  }
  problem.anchor_oldest(2);
  return problem;
}

BAProblem perturb(const BAProblem& problem, const PerturbOptions& options,
                  std::uint64_t seed, const SphericalCamera& cam) {
  if (options.pose_sigma < 0.0 || options.depth_sigma < 0.0 || options.pixel_sigma < 0.0 ||
      options.pose_max_norm < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "noise levels must be non-negative");
  }
  BAProblem out = problem;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  if (options.pose_sigma > 0.0) {
    for (auto& [frame, pose] : out.poses) {
      if (out.anchors.count(frame)) continue;
      Vector6d xi;
      for (int k = 0; k < 6; ++k) xi(k) = options.pose_sigma * normal(rng);
      if (options.pose_max_norm > 0.0 && xi.norm() > options.pose_max_norm) {
        xi *= options.pose_max_norm / xi.norm();
      }
      pose = exp_se3(TwistSE3::from_vector(xi)) * pose;
    }
  }
  if (options.depth_sigma > 0.0) {
    for (const auto& [id, patch] : problem.graph.patches()) {
      const double scale = std::exp(options.depth_sigma * normal(rng));
      out.graph.set_inv_depth(id, InverseDepth(patch.inv_depth.value * scale));
    }
  }
  if (options.pixel_sigma > 0.0) {
    const double w = 1.0 / (options.pixel_sigma * options.pixel_sigma);
    for (auto& [edge, obs] : out.observations) {
      obs.target.u = wrap_u(obs.target.u + options.pixel_sigma * normal(rng), cam);
      obs.target.v += options.pixel_sigma * normal(rng);
      obs.weight = Eigen::Vector2d(w, w);
    }
  }
  return out;
}

}  // namespace omnivo
