// Acceptance checks for the geometric and optimization core. Prints one
// PASS/FAIL line per criterion and exits nonzero if any fails.
//
// Usage: omnivo_acceptance <path to omnivo_cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.h"
#include "omnivo/error.h"
#include "omnivo/eval.h"
#include "omnivo/io.h"
#include "omnivo/odba.h"
#include "omnivo/patch_graph.h"
#include "omnivo/sphere_sampling.h"
#include "omnivo/synth.h"
#include "oracles.h"

namespace {

using namespace omnivo;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

PoseSE3 twist_pose(const Vector6d& xi) { return exp_se3(TwistSE3::from_vector(xi)); }

// 1. Analytic edge Jacobians against central differences of the oracle
// projection chain.
Outcome jacobians() {
  const SphericalCamera cam(3840, 1920);
  const int W = cam.width(), H = cam.height();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1, 1), col(0, W), lat(-85, 85), inv(0.1, 2);
  auto diff = [W](const Eigen::VectorXd& d) -> Eigen::VectorXd {
    return Eigen::Vector2d(oracle::wrap(d(0), W), d(1));
  };
  auto rel = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& n) {
    return (a - n).norm() / std::max(n.norm(), 1.0);
  };
  const auto start = Clock::now();
  int checked = 0;
  double worst = 0;
  while (checked < 1000) {
    Vector6d a, b;
    for (int k = 0; k < 6; ++k) {
      a(k) = 2 * u(rng);
      b(k) = 2 * u(rng);
    }
    const PoseSE3 Ti = twist_pose(a), Tj = twist_pose(b);
    Patch p;
    p.center = {col(rng), H / 2.0 - H / 180.0 * lat(rng)};
    p.inv_depth = InverseDepth(inv(rng));
    const auto J = try_edge_jacobians(p, Ti, Tj, cam);
    if (!J) continue;
    if (std::abs(J->reprojection.v - H / 2.0) >= H / 2.0 * 85.0 / 90.0) continue;
    const Eigen::Vector3d Xj =
        (Tj * Ti.inverse()).act(Eigen::Vector3d(unproject(p.center, p.inv_depth, cam).head<3>()));
    if (Xj.norm() < 0.2) continue;
    const Eigen::Vector2d c = p.center.vector();
    const Eigen::MatrixXd Ni = oracle::numeric_jacobian(
        [&](const Eigen::VectorXd& xi) -> Eigen::VectorXd {
          return oracle::reproject(c, p.inv_depth.value, oracle::exp_series(xi) * Ti.matrix(),
                                   Tj.matrix(), W, H);
        },
        Eigen::VectorXd::Zero(6), Eigen::VectorXd::Constant(6, 1e-6), diff);
    const Eigen::MatrixXd Nj = oracle::numeric_jacobian(
        [&](const Eigen::VectorXd& xi) -> Eigen::VectorXd {
          return oracle::reproject(c, p.inv_depth.value, Ti.matrix(),
                                   oracle::exp_series(xi) * Tj.matrix(), W, H);
        },
        Eigen::VectorXd::Zero(6), Eigen::VectorXd::Constant(6, 1e-6), diff);
    const Eigen::MatrixXd Nd = oracle::numeric_jacobian(
        [&](const Eigen::VectorXd& d) -> Eigen::VectorXd {
          return oracle::reproject(c, d(0), Ti.matrix(), Tj.matrix(), W, H);
        },
        Eigen::VectorXd::Constant(1, p.inv_depth.value),
        Eigen::VectorXd::Constant(1, 1e-8 * p.inv_depth.value), diff);
    worst = std::max({worst, rel(J->J_i, Ni), rel(J->J_j, Nj), rel(J->J_d, Nd)});
    ++checked;
  }
  const double t = seconds_since(start);
  return {worst < 1e-5 && t < 5.0,
          std::to_string(checked) + " configs, max rel err " + fmt("%.3g", worst) + ", " +
              fmt("%.2f s", t)};
}

// 2. Projection round trip and closed-form pixels.
Outcome projection() {
  const SphericalCamera cam(3840, 1920);
  const double W = cam.width(), H = cam.height();
  const auto start = Clock::now();
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> col(0, W), row(1, H - 1), inv(0.01, 10);
  double worst = 0;
  for (int i = 0; i < 100000; ++i) {
    const PixelCoord p{col(rng), row(rng)};
    const PixelCoord q = project(unproject(p, InverseDepth(inv(rng)), cam), cam);
    worst = std::max({worst, std::abs(wrap_u_difference(q.u - p.u, cam)), std::abs(q.v - p.v)});
  }
  const PixelCoord center = project(Eigen::Vector3d(0, 0, 1), cam);
  const PixelCoord right = project(Eigen::Vector3d(1, 0, 0), cam);
  const double s = std::sqrt(0.5);
  const PixelCoord up = project(Eigen::Vector3d(0, -s, s), cam);
  const double ex = std::max({std::abs(center.u - W / 2), std::abs(center.v - H / 2),
                              std::abs(right.u - 3 * W / 4), std::abs(right.v - H / 2),
                              std::abs(up.u - W / 2), std::abs(up.v - H / 4)});
  const double t = seconds_since(start);
  return {worst < 1e-9 && ex < 1e-9 && t < 1.0,
          "round trip " + fmt("%.3g px", worst) + ", examples " + fmt("%.3g px", ex) + ", " +
              fmt("%.2f s", t)};
}

// 3. Recovery from perturbed poses without measurement noise.
Outcome recovery() {
  const SphericalCamera cam(3840, 1920);
  int good = 0, slow = 0, long_runs = 0, failures = 0;
  double worst_time = 0, worst_good_ate = 0;
  int max_iters = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    try {
      const auto s = fixtures::make_synthetic(seed, cam, 8, 64, 3);
      BAProblem p = perturb(s.truth, {0.05, 0.05, 0.0, 0.0}, seed + 1000, cam);
      SolverOptions o;
      o.max_iterations = 15;
      const auto start = Clock::now();
      const SolveReport r = gauss_newton(p, cam, o);
      const double t = seconds_since(start);
      const double ate =
          ate_rmse(fixtures::solved_trajectory(p), fixtures::to_trajectory(s.camera_to_world));
      worst_time = std::max(worst_time, t);
      max_iters = std::max(max_iters, r.accepted_steps());
      if (t >= 2.0) ++slow;
      if (r.termination == Termination::kMaxIterations) ++long_runs;
      if (ate < 1e-6 && t < 2.0 && r.termination != Termination::kMaxIterations) {
        ++good;
        worst_good_ate = std::max(worst_good_ate, ate);
      }
    } catch (const Error& e) {
      ++failures;
    }
  }
  return {good >= 95,
          std::to_string(good) + "/100 seeds ATE < 1e-6 (worst " + fmt("%.3g", worst_good_ate) +
              "), max " + std::to_string(max_iters) + " iterations, " +
              std::to_string(long_runs) + " hit the cap, slowest " + fmt("%.3f s", worst_time) +
              ", " + std::to_string(failures) + " errors"};
}

Eigen::VectorXd dense_damped(const NormalEquations& ne, double lambda) {
  const auto F6 = ne.A.rows(), P = ne.C.size();
  Eigen::MatrixXd H(F6 + P, F6 + P);
  H << ne.A, ne.B, ne.B.transpose(), Eigen::MatrixXd(ne.C.asDiagonal());
  H.diagonal() *= (1.0 + lambda);
  H.diagonal().tail(P).array() += kDepthRegularizer;
  Eigen::VectorXd g(F6 + P);
  g << ne.r_pose, ne.r_depth;
  return oracle::dense_solve(H, g);
}

double schur_error(const NormalEquations& ne, double lambda) {
  const SchurUpdate s = schur_solve(ne, lambda);
  Eigen::VectorXd x(s.pose.size() + s.depth.size());
  x << s.pose, s.depth;
  const Eigen::VectorXd ref = dense_damped(ne, lambda);
  return (x - ref).norm() / ref.norm();
}

// 4. Schur complement path against a dense solve of the full system.
Outcome schur() {
  std::mt19937_64 rng(104);
  std::normal_distribution<double> n(0, 1);
  double worst = 0;
  int systems = 0;
  for (int F = 1; F <= 12; ++F) {
    for (int P : {1, 20, 100, 200}) {
      NormalEquations ne;
      ne.A = Eigen::MatrixXd::Zero(6 * F, 6 * F);
      ne.B = Eigen::MatrixXd::Zero(6 * F, P);
      ne.C = Eigen::VectorXd::Zero(P);
      ne.r_pose = Eigen::VectorXd::Zero(6 * F);
      ne.r_depth = Eigen::VectorXd::Zero(P);
      // Rows shaped like reprojection residuals: two poses and one depth each.
      for (int r = 0; r < 6 * (6 * F + P); ++r) {
        const int p = r % P;
        const int fi = static_cast<int>(rng() % F), fj = static_cast<int>(rng() % F);
        Eigen::VectorXd jp = Eigen::VectorXd::Zero(6 * F);
        for (int k = 0; k < 6; ++k) {
          jp(6 * fi + k) += n(rng);
          jp(6 * fj + k) += n(rng);
        }
        const double jd = n(rng), e = n(rng);
        ne.A += jp * jp.transpose();
        ne.B.col(p) += jp * jd;
        ne.C(p) += jd * jd;
        ne.r_pose += jp * e;
        ne.r_depth(p) += jd * e;
      }
      for (int k = 0; k < F; ++k) ne.free_frames.push_back(k);
      for (int k = 0; k < P; ++k) ne.patch_ids.push_back(k);
      for (double lambda : {0.0, 1e-4, 1.0}) worst = std::max(worst, schur_error(ne, lambda));
      ++systems;
    }
  }
  // Normal equations of rendered problems: 12 poses, 10 free, 192 patches.
  const SphericalCamera cam(1920, 960);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = fixtures::make_synthetic(seed, cam, 12, 16, 3);
    const BAProblem p = perturb(s.truth, {0.05, 0.05, 0.1, 0.5}, seed, cam);
    const NormalEquations ne = build_normal_equations(p, cam);
    for (double lambda : {0.0, 1e-4}) worst = std::max(worst, schur_error(ne, lambda));
    ++systems;
  }
  return {worst < 1e-8,
          std::to_string(systems) + " systems up to 12 poses / 200 patches, max rel diff " +
              fmt("%.3g", worst)};
}

// Applies x -> s (R x + t) to the world: world-to-camera poses become
// T G^-1 with scaled translations, inverse depths shrink by s.
BAProblem transform_world(const BAProblem& in, const PoseSE3& G, double s) {
  BAProblem out = in;
  for (auto& [f, T] : out.poses) {
    const PoseSE3 M = T * G.inverse();
    T = PoseSE3(M.rotation(), s * M.translation());
  }
  for (const auto& [id, patch] : in.graph.patches()) {
    out.graph.set_inv_depth(id, InverseDepth(patch.inv_depth.value / s));
  }
  return out;
}

// 5. The converged solution does not depend on the choice of world frame
// and scale.
Outcome gauge() {
  const SphericalCamera cam(1920, 960);
  double cost_diff = 0, ate_diff = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = fixtures::make_synthetic(seed, cam, 8, 48, 3);
    const Trajectory gt = fixtures::to_trajectory(s.camera_to_world);
    const PoseSE3 G = twist_pose((Vector6d() << 3, -2, 1, 0.4, -1.1, 2.0).finished());
    const double scale = 2.5;
    for (double sigma : {0.0, 0.5}) {
      BAProblem a = perturb(s.truth, {0.05, 0.05, 0.05, sigma}, seed + 7, cam);
      BAProblem b = transform_world(a, G, scale);
      SolverOptions o;
      o.max_iterations = 30;
      const SolveReport ra = gauss_newton(a, cam, o);
      const SolveReport rb = gauss_newton(b, cam, o);
      cost_diff = std::max(cost_diff, std::abs(ra.final_cost() - rb.final_cost()) /
                                          std::max(1.0, ra.final_cost()));
      ate_diff = std::max(ate_diff, std::abs(ate_rmse(fixtures::solved_trajectory(a), gt) -
                                             ate_rmse(fixtures::solved_trajectory(b), gt)));
    }
  }
  return {cost_diff < 1e-9 && ate_diff < 1e-9,
          "max cost diff " + fmt("%.3g", cost_diff) + " (relative), max ATE diff " +
              fmt("%.3g", ate_diff)};
}

// 6. Error growth with pixel noise under inverse-variance weights.
Outcome noise() {
  const SphericalCamera cam(1920, 960);
  const std::vector<double> sigmas = {0.25, 0.5, 1.0};
  std::vector<double> xs, ys, level_mean;
  int errors = 0;
  for (double sigma : sigmas) {
    double sum = 0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      try {
        const auto s = fixtures::make_synthetic(seed, cam, 8, 64, 3);
        BAProblem p = perturb(s.truth, {0.02, 0.02, 0.02, sigma}, seed + 500, cam);
        SolverOptions o;
        o.max_iterations = 30;
        gauss_newton(p, cam, o);
        const double ate =
            ate_rmse(fixtures::solved_trajectory(p), fixtures::to_trajectory(s.camera_to_world));
        xs.push_back(sigma);
        ys.push_back(ate);
        sum += ate;
        ++count;
      } catch (const Error&) {
        ++errors;
      }
    }
    level_mean.push_back(sum / count);
  }
  const bool monotone = level_mean[0] < level_mean[1] && level_mean[1] < level_mean[2];
  const double r_means = oracle::pearson(sigmas, level_mean);
  const double r_pooled = oracle::pearson(xs, ys);
  return {monotone && r_means > 0.95 && errors == 0,
          "mean ATE " + fmt("%.3g", level_mean[0]) + " / " + fmt("%.3g", level_mean[1]) + " / " +
              fmt("%.3g", level_mean[2]) + ", r(level means) " + fmt("%.4f", r_means) +
              ", r(pooled runs) " + fmt("%.4f", r_pooled) + ", " + std::to_string(errors) +
              " errors"};
}

Sim3 random_sim3(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0, 1);
  Sim3 s;
  s.scale = scale;
  s.rotation = oracle::rodrigues(Eigen::Vector3d(n(rng), n(rng), n(rng)));
  s.translation = 5 * Eigen::Vector3d(n(rng), n(rng), n(rng));
  return s;
}

// 7. Similarity alignment.
Outcome umeyama() {
  std::mt19937_64 rng(107);
  std::normal_distribution<double> n(0, 1);
  double worst = 0, worst_ate = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Sim3 truth = random_sim3(rng, 2.0);
    std::vector<Eigen::Vector3d> src, dst;
    for (int k = 0; k < 50; ++k) {
      src.emplace_back(n(rng), n(rng), n(rng));
      dst.push_back(truth.apply(src.back()));
    }
    const Sim3 est = umeyama_sim3(src, dst);
    worst = std::max({worst, std::abs(est.scale - 2.0),
                      (est.rotation - truth.rotation).cwiseAbs().maxCoeff(),
                      (est.translation - truth.translation).cwiseAbs().maxCoeff()});

    Trajectory gt, moved;
    PoseSE3 T;
    for (int k = 0; k < 30; ++k) {
      gt.push_back(k, T);
      moved.push_back(k, truth.apply(T));
      T = T * twist_pose(0.2 * (Vector6d() << n(rng), n(rng), n(rng), n(rng), n(rng), n(rng))
                                   .finished());
    }
    worst_ate = std::max(worst_ate, ate_rmse(moved, gt));
  }
  return {worst < 1e-10 && worst_ate < 1e-10,
          "max parameter error " + fmt("%.3g", worst) + ", max ATE of Sim(3) copy " +
              fmt("%.3g", worst_ate)};
}

// 8. Metric definitions.
Outcome metrics() {
  std::mt19937_64 rng(108);
  std::normal_distribution<double> n(0, 1);
  Trajectory gt;
  PoseSE3 T;
  for (int k = 0; k < 50; ++k) {
    gt.push_back(0.1 * k, T);
    T = T * twist_pose(0.2 * (Vector6d() << n(rng), n(rng), n(rng), n(rng), n(rng), n(rng))
                                 .finished());
  }
  const MetricsReport same = evaluate(gt, gt);
  Trajectory g2, e2;
  g2.push_back(0, {});
  g2.push_back(1, PoseSE3(Eigen::Matrix3d::Identity(), Eigen::Vector3d(1, 0, 0)));
  e2.push_back(0, {});
  e2.push_back(1, PoseSE3(Eigen::Matrix3d::Identity(), Eigen::Vector3d(1.1, 0, 0)));
  EvalOptions raw;
  raw.rpe_scale_correction = false;
  const RelativePoseError r = rpe(e2, g2, raw);
  const double expected = 1.1 - 1.0;  // translation gap over one frame
  const bool pass = same.ate_rmse < 1e-12 && same.rpe_t_rmse < 1e-12 &&
                    same.rpe_r_rmse < 1e-6 && r.translation == expected &&
                    r.rotation_deg == 0.0;
  return {pass, "identity ATE " + fmt("%.3g", same.ate_rmse) + " RPE " +
                    fmt("%.3g", same.rpe_t_rmse) + " / " + fmt("%.3g deg", same.rpe_r_rmse) +
                    ", two-pose RPE " + fmt("%.17g", r.translation) + " (expected " +
                    fmt("%.17g", expected) + ")"};
}

// 9. Tangent-plane sampling grids.
Outcome grids() {
  const SphericalCamera cam(3840, 1920);
  const double step = default_grid_step(cam);
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> th(-oracle::kPi, oracle::kPi), ph(-1.3, 1.3), dt(-3, 3);
  double equiv = 0;
  bool center_ok = true, single_ok = true;
  for (int i = 0; i < 500; ++i) {
    const SphericalAngles a{th(rng), ph(rng)};
    const double delta = dt(rng);
    const SamplingGrid g0 = kernel_grid(a, 7, step, cam);
    const SamplingGrid g1 = kernel_grid({a.theta + delta, a.phi}, 7, step, cam);
    for (size_t k = 0; k < g0.samples.size(); ++k) {
      const double du = g1.samples[k].u - (g0.samples[k].u + cam.fx() * delta);
      equiv = std::max({equiv, std::abs(wrap_u_difference(du, cam)),
                        std::abs(g1.samples[k].v - g0.samples[k].v)});
    }
    const Eigen::Vector2d c = oracle::project(bearing(a), cam.width(), cam.height());
    center_ok = center_ok && std::abs(wrap_u_difference(g0.center().u - c.x(), cam)) < 1e-9 &&
                std::abs(g0.center().v - c.y()) < 1e-9;
    PixelCoord direct = angles_to_pixel(a, cam);
    direct.u = wrap_u(direct.u, cam);
    center_ok = center_ok && g0.center() == direct;
    const SamplingGrid one = kernel_grid(a, 1, step, cam);
    single_ok = single_ok && one.samples.size() == 1 && one.samples[0] == direct;
  }
  bool monotone = true;
  double last = 0;
  for (double deg = 0; deg < 85; deg += 0.5) {
    const double span = horizontal_span(kernel_grid({0.7, deg * oracle::kPi / 180}, 7, step, cam), cam);
    monotone = monotone && span >= last;
    last = span;
  }
  return {equiv < 1e-9 && center_ok && single_ok && monotone,
          "equivariance " + fmt("%.3g px", equiv) + ", center " + (center_ok ? "exact" : "off") +
              ", span " + (monotone ? "monotone" : "not monotone") + ", k=1 " +
              (single_ok ? "degenerate" : "wrong")};
}

// 10. Graph edges against brute-force enumeration of the radius rule.
Outcome graph() {
  int combos = 0, mismatches = 0;
  for (int frames = 1; frames <= 10; ++frames) {
    for (int r = 1; r <= 5; ++r) {
      for (int spacing : {1, 2}) {
        PatchGraph g(r, 3);
        std::vector<int> ids;
        std::vector<PixelCoord> centers = {{10, 10}, {20, 20}, {30, 30}};
        for (int k = 0; k < frames; ++k) {
          g.add_frame(spacing * k, centers);
          ids.push_back(spacing * k);
        }
        std::multiset<std::pair<int, int>> expected, actual;
        for (const auto& pr : oracle::radius_pairs(ids, r)) {
          for (int c = 0; c < 3; ++c) expected.insert(pr);
        }
        for (const Edge& e : g.edges()) {
          actual.emplace(g.patch(e.patch).source_frame, e.target_frame);
        }
        mismatches += expected != actual;
        ++combos;
      }
    }
  }
  return {mismatches == 0, std::to_string(combos) + " combinations, " +
                               std::to_string(mismatches) + " mismatches"};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 11. simulate -> solve -> evaluate through the command-line tool.
Outcome end_to_end(const std::string& cli) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "omnivo_acceptance_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string q = " > " + (dir / "log.txt").string() + " 2>&1";
  const auto start = Clock::now();
  const int a = std::system((cli + " simulate --preset default --seed 3 --out " + dir.string() + q).c_str());
  const int b = a ? a : std::system((cli + " solve --preset default --problem " +
                                     (dir / "problem.odba").string() + " --out " + dir.string() + q)
                                        .c_str());
  const int c = b ? b : std::system((cli + " evaluate --est " + (dir / "trajectory.tum").string() +
                                     " --gt " + (dir / "groundtruth.tum").string() + " --out " +
                                     (dir / "metrics.csv").string() + q)
                                        .c_str());
  const double t = seconds_since(start);
  if (c != 0) return {false, "command failed: " + read_file(dir / "log.txt")};
  std::istringstream csv(read_file(dir / "metrics.csv"));
  std::string line, last;
  while (std::getline(csv, line)) {
    if (!line.empty() && line[0] != '#') last = line;
  }
  const size_t comma = last.find(',');
  const double ate = comma == std::string::npos ? 1.0 : std::atof(last.c_str() + comma + 1);
  return {ate < 1e-6 && t < 30.0, "ATE " + fmt("%.3g", ate) + ", " + fmt("%.2f s", t)};
}

// 12. Text formats survive write/read/write unchanged.
Outcome formats() {
  std::mt19937_64 rng(112);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> unit(0, 1);
  int tum_bad = 0, odba_bad = 0;
  double tum_err = 0, odba_err = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    Trajectory t;
    double time = 1e9 * unit(rng);
    for (int k = 0; k < 20; ++k) {
      t.push_back(time, PoseSE3(oracle::rodrigues(3.0 * unit(rng) *
                                                  Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized()),
                                20 * Eigen::Vector3d(n(rng), n(rng), n(rng))));
      time += 0.001 + unit(rng);
    }
    std::ostringstream a;
    format_tum(a, t);
    std::istringstream ain(a.str());
    const Trajectory back = parse_tum(ain);
    std::ostringstream b;
    format_tum(b, back);
    tum_bad += a.str() != b.str();
    for (size_t k = 0; k < t.size(); ++k) {
      tum_err = std::max({tum_err, (back[k].pose.rotation() - t[k].pose.rotation()).cwiseAbs().maxCoeff(),
                          (back[k].pose.translation() - t[k].pose.translation()).cwiseAbs().maxCoeff() / 20});
    }

    const int W = 64 * (1 + static_cast<int>(rng() % 60));
    const SphericalCamera cam(W, W / 2);
    const int frames = 2 + static_cast<int>(rng() % 6);
    const int per = 1 + static_cast<int>(rng() % 6);
    const int radius = 1 + static_cast<int>(rng() % 4);
    BAProblem p;
    p.graph = PatchGraph(radius, per);
    for (int f = 0; f < frames; ++f) {
      std::vector<PixelCoord> centers;
      for (int k = 0; k < per; ++k) centers.push_back({W * unit(rng), W / 2 * unit(rng)});
      const auto ids = p.graph.add_frame(f, centers);
      for (PatchId id : ids) p.graph.set_inv_depth(id, InverseDepth(0.01 + 5 * unit(rng)));
      p.poses[f] = twist_pose((Vector6d() << 10 * n(rng), 10 * n(rng), 10 * n(rng), n(rng),
                               n(rng), n(rng)).finished());
    }
    for (const Edge& e : p.graph.edges()) {
      Observation o;
      o.target = {W * unit(rng), W / 2 * unit(rng)};
      o.weight = {unit(rng) * 10, unit(rng) * 10};
      p.observations[e] = o;
    }
    p.anchor_oldest(2);
    std::ostringstream d1;
    format_problem(d1, p, cam);
    std::istringstream din(d1.str());
    const ProblemFile f = parse_problem(din);
    std::ostringstream d2;
    format_problem(d2, f.problem, f.camera);
    odba_bad += d1.str() != d2.str() || f.problem.anchors != p.anchors;
    for (const auto& [id, patch] : p.graph.patches()) {
      odba_err = std::max(odba_err, std::abs(f.problem.graph.patch(id).inv_depth.value -
                                             patch.inv_depth.value) / patch.inv_depth.value);
    }
    for (const auto& [fr, T] : p.poses) {
      odba_err = std::max(odba_err, (f.problem.poses.at(fr).rotation() - T.rotation()).cwiseAbs().maxCoeff());
    }
  }
  return {tum_bad == 0 && odba_bad == 0 && tum_err < 1e-10 && odba_err < 1e-10,
          "1000 TUM + 1000 ODBA-SYNTH instances, " + std::to_string(tum_bad + odba_bad) +
              " unstable, max value error " + fmt("%.3g", std::max(tum_err, odba_err))};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <omnivo_cli>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"edge Jacobians vs finite differences", jacobians},
      {"projection model", projection},
      {"recovery from perturbed poses", recovery},
      {"Schur vs dense solve", schur},
      {"gauge invariance", gauge},
      {"noise scaling", noise},
      {"Umeyama alignment", umeyama},
      {"metric definitions", metrics},
      {"sampling grid properties", grids},
      {"patch graph radius rule", graph},
      {"end-to-end CLI", [&] { return end_to_end(cli); }},
      {"file format round trips", formats},
  };
  int failed = 0;
  for (size_t i = 0; i < checks.size(); ++i) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %zu %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                checks[i].first.c_str(), o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", checks.size() - failed, checks.size());
  return failed == 0 ? 0 : 1;
}
