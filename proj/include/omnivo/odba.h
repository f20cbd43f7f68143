#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "omnivo/lie.h"
#include "omnivo/patch_graph.h"
#include "omnivo/sphere_camera.h"

namespace omnivo {

// Omnidirectional bundle adjustment over camera poses and patch inverse
// depths.
//
// Poses map world coordinates into the camera frame, so the transform from
// camera i to camera j is T_ij = T_j * T_i^-1 and a patch observed in frame i
// reprojects into frame j as p' = project(T_ij * unproject(p, d)).
// Residuals are e = p* - p' with the horizontal component wrapped across the
// longitude seam, and the cost is sum(e^T diag(w) e) over edges.
// Pose updates are applied on the left, T <- exp(dxi) * T, depths
// additively, d <- d + dd.

using Matrix2x6 = Eigen::Matrix<double, 2, 6>;

struct Observation {
  PixelCoord target;                                 // predicted center p*
  Eigen::Vector2d weight = Eigen::Vector2d::Ones();  // diagonal of Sigma^-1
};

struct BAProblem {
  PatchGraph graph{3, 1};
  std::map<FrameId, PoseSE3> poses;
  std::map<Edge, Observation> observations;
  std::set<FrameId> anchors;

  // Anchors the `count` oldest active frames, removing the monocular gauge
  // (rigid motion and scale) when they have a nonzero baseline.
  void anchor_oldest(int count = 2);
  // Throws InvalidArgument when an edge lacks an observation, a frame lacks a
  // pose, a weight is negative, or fewer than two frames are anchored.
  void validate() const;
};

std::optional<PixelCoord> try_reproject_patch(const Patch& patch, const PoseSE3& T_i,
                                              const PoseSE3& T_j,
                                              const SphericalCamera& cam);

// Throws PoleSingular or DegeneratePoint when the transformed point cannot be
// projected, NonPositiveDepth for a bad patch depth.
PixelCoord reproject_patch(const Patch& patch, const PoseSE3& T_i, const PoseSE3& T_j,
                           const SphericalCamera& cam);

// (wrap(p*.u - p'.u), p*.v - p'.v) with the wrap into [-W/2, W/2).
Eigen::Vector2d residual(const PixelCoord& p_star, const PixelCoord& p_prime,
                         const SphericalCamera& cam);

struct EdgeJacobians {
  Matrix2x6 J_i;       // d p' / d xi_i
  Matrix2x6 J_j;       // d p' / d xi_j
  Eigen::Vector2d J_d;  // d p' / d d
  PixelCoord reprojection;
};

std::optional<EdgeJacobians> try_edge_jacobians(const Patch& patch, const PoseSE3& T_i,
                                                const PoseSE3& T_j,
                                                const SphericalCamera& cam);

// Throws PoleSingular when the reprojection falls inside the pole guard.
EdgeJacobians edge_jacobians(const Patch& patch, const PoseSE3& T_i, const PoseSE3& T_j,
                             const SphericalCamera& cam);

// Blocked normal equations
//   [ A   B ] [dxi]   [r_pose ]
//   [ B^T C ] [dd ] = [r_depth]
// over the free (non-anchored) poses and the patches that have edges. C is
// diagonal because each residual depends on a single depth.
struct NormalEquations {
  std::vector<FrameId> free_frames;  // block k of A covers free_frames[k]
  std::vector<PatchId> patch_ids;    // entry k of C covers patch_ids[k]
  Eigen::MatrixXd A;                 // 6F x 6F
  Eigen::MatrixXd B;                 // 6F x P
  Eigen::VectorXd C;                 // P
  Eigen::VectorXd r_pose;            // 6F
  Eigen::VectorXd r_depth;           // P
  double cost = 0.0;
  int valid_edges = 0;
  int skipped_edges = 0;

  int pose_dim() const { return static_cast<int>(A.rows()); }
  int depth_dim() const { return static_cast<int>(C.size()); }
};

// Edges whose reprojection lands in the pole guard are skipped and counted.
// Throws NoFreeVariables when every pose is anchored and no patch has edges.
NormalEquations build_normal_equations(const BAProblem& problem,
                                       const SphericalCamera& cam);

struct SchurUpdate {
  Eigen::VectorXd pose;   // 6F, twist per free frame in (v, omega) order
  Eigen::VectorXd depth;  // P

  double max_abs() const;
};

// Regularizer added to the depth block so patches with weak or no
// constraints stay invertible.
inline constexpr double kDepthRegularizer = 1e-10;

// Damped Schur complement solve:
//   A~ = A + damping * diag(A),  C~ = C + damping * diag(C) + eps * I
//   S  = A~ - B C~^-1 B^T,       S dxi = r_pose - B C~^-1 r_depth
//   dd = C~^-1 (r_depth - B^T dxi)
// Throws SingularSystem when S cannot be factorized.
SchurUpdate schur_solve(const NormalEquations& ne, double damping);

// Weighted cost of the problem in its current state. Unprojectable edges are
// skipped; their number goes to `skipped` when given.
double evaluate_cost(const BAProblem& problem, const SphericalCamera& cam,
                     int* skipped = nullptr);

struct SolverOptions {
  int max_iterations = 8;
  double damping = 1e-4;       // 0 selects plain Gauss-Newton steps
  double damping_floor = 1e-8;
  int max_retries = 5;
  double tolerance = 1e-10;    // on the infinity norm of the update
  double min_inv_depth = 1e-6;
};

enum class Termination { kConverged, kMaxIterations, kStalled };

const char* to_string(Termination t);

struct IterationRecord {
  int iteration = 0;
  double cost = 0.0;
  double damping = 0.0;
  int skipped = 0;
  double max_pose_step = 0.0;
  double max_depth_step = 0.0;
};

struct SolveReport {
  // Entry 0 is the initial state; each later entry is an accepted step.
  std::vector<IterationRecord> iterations;
  Termination termination = Termination::kMaxIterations;
  int rejected_steps = 0;

  double initial_cost() const { return iterations.front().cost; }
  double final_cost() const { return iterations.back().cost; }
  int accepted_steps() const { return static_cast<int>(iterations.size()) - 1; }
};

// Levenberg-damped Gauss-Newton. A step that raises the cost is retried with
// doubled damping up to max_retries times before DivergenceDetected is
// thrown; accepted steps halve the damping. An increase that is within
// floating-point noise of the current cost ends the solve as kStalled.
// Anchored poses are never written.
SolveReport gauss_newton(BAProblem& problem, const SphericalCamera& cam,
                         const SolverOptions& options = {});

// Incremental solve: frames are introduced in order and each step optimizes
// only the newest `window` frames, anchored at the two oldest of them. Poses
// and depths that leave the window stay frozen. With a window covering every
// frame the final step is the batch problem.
std::vector<SolveReport> solve_sliding_window(BAProblem& problem,
                                              const SphericalCamera& cam,
                                              const SolverOptions& options, int window);

}  // namespace omnivo
