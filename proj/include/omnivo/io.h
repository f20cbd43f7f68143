#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "omnivo/eval.h"
#include "omnivo/odba.h"
#include "omnivo/patch_graph.h"
#include "omnivo/sphere_camera.h"

namespace omnivo {

// Text formats. Numbers are written with %.12g unless noted; every reader
// throws ParseError naming the source and line on malformed input.

// TUM trajectories: `timestamp tx ty tz qx qy qz qw` per line, `#` starts a
// comment. Quaternions are Hamilton, normalized on read, and rejected with
// NonUnitQuaternion when their norm is off by more than 1e-3. Poses are
// camera-to-world.
Trajectory parse_tum(std::istream& in, const std::string& source = "<stream>");
void format_tum(std::ostream& out, const Trajectory& traj);
Trajectory read_tum(const std::string& path);
void write_tum(const Trajectory& traj, const std::string& path);

// Problem dump, ODBA-SYNTH v1:
//   ODBA-SYNTH v1 W H r N
//   POSE frame qw qx qy qz tx ty tz      world-to-camera
//   PATCH id frame u v inv_depth
//   PRED patch_id frame u v w_u w_v
// Loading anchors the two oldest frames. Writing a loaded problem reproduces
// the file byte for byte.
struct ProblemFile {
  SphericalCamera camera{2, 2};
  BAProblem problem;
};

void format_problem(std::ostream& out, const BAProblem& problem, const SphericalCamera& cam);
ProblemFile parse_problem(std::istream& in, const std::string& source = "<stream>");
void save_problem(const std::string& path, const BAProblem& problem, const SphericalCamera& cam);
ProblemFile load_problem(const std::string& path);

// Debug dump of a patch graph: `PATCH id frame u v inv_depth` and
// `EDGE patch frame` lines, 9 significant digits.
void format_graph(std::ostream& out, const PatchGraph& graph);

// Per-iteration solver table `iter cost damping skipped dxi_max dd_max`
// followed by the termination reason.
void format_solve_report(std::ostream& out, const SolveReport& report);

// Camera-to-world trajectory of the problem's active frames, timestamped by
// frame index.
Trajectory problem_trajectory(const BAProblem& problem);

}  // namespace omnivo
