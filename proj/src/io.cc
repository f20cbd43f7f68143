#include "omnivo/io.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace omnivo {
namespace {

constexpr double kQuaternionTolerance = 1e-3;

// Adding zero turns -0 into 0.
std::string fmt12(double x) {
  x += 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt9(double x) {
  x += 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

[[noreturn]] void parse_error(const std::string& source, int line, const std::string& what) {
  throw Error(ErrorCode::kParseError, source + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

double to_double(const std::string& tok, const std::string& source, int line) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(x)) {
    parse_error(source, line, "invalid number '" + tok + "'");
  }
  return x;
}

int to_int(const std::string& tok, const std::string& source, int line) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const long x = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') parse_error(source, line, "invalid integer '" + tok + "'");
  return static_cast<int>(x);
}

// Strips comments and trailing carriage returns.
std::string clean(std::string line) {
  const auto hash = line.find('#');
  if (hash != std::string::npos) line.erase(hash);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

Eigen::Quaterniond checked_quaternion(double w, double x, double y, double z,
                                      const std::string& source, int line) {
  const Eigen::Quaterniond q(w, x, y, z);
  if (std::abs(q.norm() - 1.0) > kQuaternionTolerance) {
    throw Error(ErrorCode::kNonUnitQuaternion,
                source + ":" + std::to_string(line) + ": quaternion norm " +
                    std::to_string(q.norm()));
  }
  return q.normalized();
}

Eigen::Quaterniond canonical_sign(Eigen::Quaterniond q) {
  const Eigen::Vector4d c(q.w(), q.x(), q.y(), q.z());
  for (int k = 0; k < 4; ++k) {
    if (c(k) != 0.0) {
      if (c(k) < 0.0) q.coeffs() = -q.coeffs();
      break;
    }
  }
  return q;
}

struct QuaternionText {
  std::string w, x, y, z;
  bool operator==(const QuaternionText&) const = default;
};

QuaternionText quaternion_text(const Eigen::Matrix3d& R) {
  const Eigen::Quaterniond q = canonical_sign(Eigen::Quaterniond(R));
  return {fmt12(q.w()), fmt12(q.x()), fmt12(q.y()), fmt12(q.z())};
}

QuaternionText parsed_text(const QuaternionText& t) {
  const Eigen::Quaterniond q(std::strtod(t.w.c_str(), nullptr), std::strtod(t.x.c_str(), nullptr),
                             std::strtod(t.y.c_str(), nullptr), std::strtod(t.z.c_str(), nullptr));
  return quaternion_text(q.normalized().toRotationMatrix());
}

// Quaternion digits that reload to a rotation which prints the same digits
// again. Rounding to 12 digits and renormalizing can move the last digit, so
// the nearest digit strings are searched, growing the offset in last-digit
// units, for one that maps to itself.
QuaternionText stable_quaternion_text(const Eigen::Matrix3d& R) {
  const Eigen::Quaterniond q = canonical_sign(Eigen::Quaterniond(R));
  const std::array<double, 4> base = {q.w(), q.x(), q.y(), q.z()};
  std::array<double, 4> unit{};
  for (int k = 0; k < 4; ++k) {
    unit[k] = base[k] == 0.0 ? 0.0 : std::pow(10.0, std::floor(std::log10(std::abs(base[k]))) - 11);
  }
  const QuaternionText first = quaternion_text(R);
  for (int radius = 0; radius <= 3; ++radius) {
    for (int a = -radius; a <= radius; ++a) {
      for (int b = -radius; b <= radius; ++b) {
        for (int c = -radius; c <= radius; ++c) {
          for (int d = -radius; d <= radius; ++d) {
            if (std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}) != radius) continue;
            const QuaternionText t = {fmt12(base[0] + a * unit[0]), fmt12(base[1] + b * unit[1]),
                                      fmt12(base[2] + c * unit[2]), fmt12(base[3] + d * unit[3])};
            if (parsed_text(t) == t) return t;
          }
        }
      }
    }
  }
  return first;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  return in;
}

}  // namespace

Trajectory parse_tum(std::istream& in, const std::string& source) {
  Trajectory traj;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::vector<std::string> tok = split(clean(raw));
    if (tok.empty()) continue;
    if (tok.size() != 8) {
      parse_error(source, line, "expected 8 fields, found " + std::to_string(tok.size()));
    }
    double v[8];
    for (int k = 0; k < 8; ++k) v[k] = to_double(tok[static_cast<size_t>(k)], source, line);
    const Eigen::Quaterniond q = checked_quaternion(v[7], v[4], v[5], v[6], source, line);
    try {
      traj.push_back(v[0], PoseSE3(q.toRotationMatrix(), Eigen::Vector3d(v[1], v[2], v[3])));
    } catch (const Error& e) {
      parse_error(source, line, e.what());
    }
  }
  return traj;
}

void format_tum(std::ostream& out, const Trajectory& traj) {
  for (const TimedPose& e : traj.entries()) {
    const QuaternionText q = stable_quaternion_text(e.pose.rotation());
    const Eigen::Vector3d& t = e.pose.translation();
    out << fmt12(e.timestamp) << ' ' << fmt12(t.x()) << ' ' << fmt12(t.y()) << ' '
        << fmt12(t.z()) << ' ' << q.x << ' ' << q.y << ' ' << q.z << ' ' << q.w << '\n';
  }
}

Trajectory read_tum(const std::string& path) {
  std::ifstream in = open_input(path);
  return parse_tum(in, path);
}

void write_tum(const Trajectory& traj, const std::string& path) {
  std::ofstream out = open_output(path);
  format_tum(out, traj);
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path);
}

void format_problem(std::ostream& out, const BAProblem& problem, const SphericalCamera& cam) {
  const PatchGraph& g = problem.graph;
  out << "ODBA-SYNTH v1 " << cam.width() << ' ' << cam.height() << ' ' << g.radius() << ' '
      << g.patches_per_frame() << '\n';
  for (FrameId f : g.frames()) {
    const PoseSE3& T = problem.poses.at(f);
    const QuaternionText q = stable_quaternion_text(T.rotation());
    const Eigen::Vector3d& t = T.translation();
    out << "POSE " << f << ' ' << q.w << ' ' << q.x << ' ' << q.y << ' ' << q.z << ' '
        << fmt12(t.x()) << ' ' << fmt12(t.y()) << ' ' << fmt12(t.z()) << '\n';
  }
  for (const auto& [id, p] : g.patches()) {
    out << "PATCH " << id << ' ' << p.source_frame << ' ' << fmt12(p.center.u) << ' '
        << fmt12(p.center.v) << ' ' << fmt12(p.inv_depth.value) << '\n';
  }
  for (const Edge& e : g.edges()) {
    const Observation& o = problem.observations.at(e);
    out << "PRED " << e.patch << ' ' << e.target_frame << ' ' << fmt12(o.target.u) << ' '
        << fmt12(o.target.v) << ' ' << fmt12(o.weight.x()) << ' ' << fmt12(o.weight.y())
        << '\n';
  }
}

ProblemFile parse_problem(std::istream& in, const std::string& source) {
  std::string raw;
  int line = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, raw)) {
    ++line;
    header = split(clean(raw));
  }
  if (header.size() != 6 || header[0] != "ODBA-SYNTH" || header[1] != "v1") {
    parse_error(source, line, "expected header 'ODBA-SYNTH v1 W H r N'");
  }
  const int width = to_int(header[2], source, line);
  const int height = to_int(header[3], source, line);
  const int radius = to_int(header[4], source, line);
  const int n = to_int(header[5], source, line);

  ProblemFile file;
  std::vector<FrameId> frames;
  std::vector<Patch> patches;
  std::vector<Edge> edges;
  std::map<Edge, Observation> observations;
  try {
    file.camera = SphericalCamera(width, height);
  } catch (const Error& e) {
    parse_error(source, line, e.what());
  }

  while (std::getline(in, raw)) {
    ++line;
    const std::vector<std::string> tok = split(clean(raw));
    if (tok.empty()) continue;
    auto expect = [&](size_t count) {
      if (tok.size() != count) {
        parse_error(source, line,
                    tok[0] + " expects " + std::to_string(count - 1) + " fields, found " +
                        std::to_string(tok.size() - 1));
      }
    };
    if (tok[0] == "POSE") {
      expect(9);
      const FrameId f = to_int(tok[1], source, line);
      double v[7];
      for (int k = 0; k < 7; ++k) v[k] = to_double(tok[static_cast<size_t>(k) + 2], source, line);
      const Eigen::Quaterniond q = checked_quaternion(v[0], v[1], v[2], v[3], source, line);
      if (!file.problem.poses
               .emplace(f, PoseSE3(q.toRotationMatrix(), Eigen::Vector3d(v[4], v[5], v[6])))
               .second) {
        parse_error(source, line, "duplicate pose for frame " + tok[1]);
      }
      frames.push_back(f);
    } else if (tok[0] == "PATCH") {
      expect(6);
      Patch p;
      p.id = to_int(tok[1], source, line);
      p.source_frame = to_int(tok[2], source, line);
      p.center = {to_double(tok[3], source, line), to_double(tok[4], source, line)};
      p.inv_depth = InverseDepth(to_double(tok[5], source, line));
      patches.push_back(p);
    } else if (tok[0] == "PRED") {
      expect(7);
      const Edge e{to_int(tok[1], source, line), to_int(tok[2], source, line)};
      Observation o;
      o.target = {to_double(tok[3], source, line), to_double(tok[4], source, line)};
      o.weight = {to_double(tok[5], source, line), to_double(tok[6], source, line)};
      if (!observations.emplace(e, o).second) parse_error(source, line, "duplicate prediction");
      edges.push_back(e);
    } else {
      parse_error(source, line, "unknown record '" + tok[0] + "'");
    }
  }

  try {
    file.problem.graph = PatchGraph::restore(radius, n, std::move(frames), std::move(patches),
                                             std::move(edges));
  } catch (const Error& e) {
    parse_error(source, line, e.what());
  }
  file.problem.observations = std::move(observations);
  file.problem.anchor_oldest(2);
  return file;
}

void save_problem(const std::string& path, const BAProblem& problem, const SphericalCamera& cam) {
  std::ofstream out = open_output(path);
  format_problem(out, problem, cam);
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path);
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in = open_input(path);
  return parse_problem(in, path);
}

void format_graph(std::ostream& out, const PatchGraph& graph) {
  for (const auto& [id, p] : graph.patches()) {
    out << "PATCH " << id << ' ' << p.source_frame << ' ' << fmt9(p.center.u) << ' '
        << fmt9(p.center.v) << ' ' << fmt9(p.inv_depth.value) << '\n';
  }
  for (const Edge& e : graph.edges()) out << "EDGE " << e.patch << ' ' << e.target_frame << '\n';
}

void format_solve_report(std::ostream& out, const SolveReport& report) {
  out << "iter cost damping skipped dxi_max dd_max\n";
  char buf[160];
  for (const IterationRecord& r : report.iterations) {
    std::snprintf(buf, sizeof buf, "%d %.9g %.3g %d %.3g %.3g\n", r.iteration, r.cost,
                  r.damping, r.skipped, r.max_pose_step, r.max_depth_step);
    out << buf;
  }
  out << "termination " << to_string(report.termination) << '\n';
  out << "rejected_steps " << report.rejected_steps << '\n';
}

Trajectory problem_trajectory(const BAProblem& problem) {
  Trajectory traj;
  for (FrameId f : problem.graph.frames()) {
    traj.push_back(static_cast<double>(f), problem.poses.at(f).inverse());
  }
  return traj;
}

}  // namespace omnivo
