#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "omnivo/config.h"
#include "omnivo/error.h"
#include "omnivo/eval.h"
#include "omnivo/io.h"
#include "omnivo/jacobian_check.h"
#include "omnivo/odba.h"
#include "omnivo/sphere_sampling.h"
#include "omnivo/synth.h"

namespace fs = std::filesystem;
using namespace omnivo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Options shared by the subcommands that build a RunConfig. Unset flags
// leave the preset / config-file value in place.
struct ConfigFlags {
  std::string preset = "default";
  std::string config_file;
  std::optional<int> width, height, patches, radius, window, iterations, frames, points;
  std::optional<double> damping, pose_sigma, depth_sigma, pixel_sigma, step, turn;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> profile, out;

  RunConfig resolve() const {
    RunConfig c = preset_config(preset);
    if (!config_file.empty()) apply_key_values(c, read_key_values(config_file));
    auto set = [](auto& field, const auto& flag) {
      if (flag) field = *flag;
    };
    set(c.width, width);
    set(c.height, height);
    set(c.patches_per_frame, patches);
    set(c.radius, radius);
    set(c.window, window);
    set(c.iterations, iterations);
    set(c.frames, frames);
    set(c.points, points);
    set(c.damping, damping);
    set(c.pose_sigma, pose_sigma);
    set(c.depth_sigma, depth_sigma);
    set(c.pixel_sigma, pixel_sigma);
    set(c.step, step);
    set(c.turn, turn);
    set(c.seed, seed);
    set(c.profile, profile);
    set(c.output_dir, out);
    c.validate();
    return c;
  }
};

void add_common(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--preset", f.preset, "Parameter set: default or fast")
      ->check(CLI::IsMember({"default", "fast"}));
  cmd->add_option("--config", f.config_file, "key = value file; flags override it")
      ->check(CLI::ExistingFile);
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
  return p;
}

// Synthetic truth scaled to the camera: scene, motion, rendering and the
// initial perturbation all follow the config.
int run_simulate(const RunConfig& c) {
  const SphericalCamera cam(c.width, c.height);
  const Scene scene = generate_scene(c.seed, c.points);
  MotionSpec spec;
  spec.n_frames = c.frames;
  spec.max_step = c.step;
  spec.max_turn = c.turn;
  spec.profile = parse_motion_profile(c.profile);
  const std::vector<PoseSE3> gt = generate_trajectory(c.seed, spec);
  const BAProblem truth = render_tracks(scene, gt, cam, c.patches_per_frame, c.radius);

  PerturbOptions noise;
  noise.pose_sigma = c.pose_sigma;
  noise.pose_max_norm = c.pose_sigma;
  noise.depth_sigma = c.depth_sigma;
  noise.pixel_sigma = c.pixel_sigma;
  const BAProblem problem = perturb(truth, noise, c.seed + 1, cam);

  const fs::path dir = prepare_dir(c.output_dir);
  save_problem((dir / "problem.odba").string(), problem, cam);
  write_tum(problem_trajectory(truth), (dir / "groundtruth.tum").string());
  std::printf("frames %d patches %zu edges %zu\n", c.frames, problem.graph.patches().size(),
              problem.graph.edges().size());
  std::printf("wrote %s and %s\n", (dir / "problem.odba").c_str(),
              (dir / "groundtruth.tum").c_str());
  return kExitOk;
}

int run_solve(const std::string& problem_path, const RunConfig& c) {
  ProblemFile file = load_problem(problem_path);
  SolverOptions options;
  options.max_iterations = c.iterations;
  options.damping = c.damping;

  const fs::path dir = prepare_dir(c.output_dir);
  std::ofstream report((dir / "report.txt").string());
  if (!report) throw Error(ErrorCode::kIoError, "cannot write report.txt");

  const int frames = static_cast<int>(file.problem.graph.frames().size());
  double final_cost = 0.0;
  if (frames > c.window) {
    const std::vector<SolveReport> steps =
        solve_sliding_window(file.problem, file.camera, options, c.window);
    for (size_t k = 0; k < steps.size(); ++k) {
      report << "# window step " << k << '\n';
      format_solve_report(report, steps[k]);
    }
    final_cost = evaluate_cost(file.problem, file.camera);
    std::printf("sliding window %d over %d frames, final cost %.9g\n", c.window, frames,
                final_cost);
  } else {
    const SolveReport r = gauss_newton(file.problem, file.camera, options);
    format_solve_report(report, r);
    final_cost = r.final_cost();
    std::printf("%d iterations, %s, cost %.9g -> %.9g\n", r.accepted_steps(),
                to_string(r.termination), r.initial_cost(), final_cost);
  }
  write_tum(problem_trajectory(file.problem), (dir / "trajectory.tum").string());
  return kExitOk;
}

int run_evaluate(const std::string& est_path, const std::string& gt_path,
                 const std::string& out_path, const std::string& sequence, int delta,
                 bool scale_correction) {
  const Trajectory est = read_tum(est_path);
  const Trajectory gt = read_tum(gt_path);
  EvalOptions options;
  options.rpe_delta = delta;
  options.rpe_scale_correction = scale_correction;
  const MetricsReport m = evaluate(est, gt, options);
  const std::string row = metrics_csv_row(sequence, m);

  std::ofstream out(out_path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + out_path);
  out << "# rpe translation " << (scale_correction ? "scaled by umeyama s" : "unscaled")
      << '\n'
      << metrics_csv_header() << '\n'
      << row << '\n';
  std::printf("%s\n%s\n", metrics_csv_header().c_str(), row.c_str());
  return kExitOk;
}

int run_jacobian_check(int samples, std::uint64_t seed, int width, int height) {
  const SphericalCamera cam(width, height);
  const JacobianCheckResult r = check_edge_jacobians(samples, seed, cam);
  std::printf("samples %d\nmax relative error J_i %.3e J_j %.3e J_d %.3e\nmax %.3e\n", r.samples,
              r.max_error_i, r.max_error_j, r.max_error_d, r.max_error());
  return r.max_error() < 1e-5 ? kExitOk : kExitFailure;
}

int run_grid(int width, int height, int kernel, std::optional<double> step,
             const std::string& out_path) {
  const SphericalCamera cam(width, height);
  const RowGridTable table = row_grids(cam, kernel, step.value_or(default_grid_step(cam)));
  std::ofstream out(out_path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + out_path);
  write_grid_table(out, table);
  int valid = 0;
  for (int v = 0; v < table.rows(); ++v) valid += table.has_row(v) ? 1 : 0;
  std::printf("%d of %d rows written to %s\n", valid, table.rows(), out_path.c_str());
  return kExitOk;
}

int run_preset(const std::string& name) {
  std::printf("%s", format_config(preset_config(name)).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Omnidirectional patch bundle adjustment on synthetic data"};
  app.require_subcommand(1);

  ConfigFlags sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic problem");
  add_common(simulate, sim);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--frames", sim.frames);
  simulate->add_option("--points", sim.points);
  simulate->add_option("--profile", sim.profile)
      ->check(CLI::IsMember({"line", "arc", "orbit", "random-walk"}));
  simulate->add_option("--width", sim.width);
  simulate->add_option("--height", sim.height);
  simulate->add_option("--patches", sim.patches, "Patches per frame");
  simulate->add_option("--radius", sim.radius, "Temporal edge radius");
  simulate->add_option("--step", sim.step, "Translation per frame");
  simulate->add_option("--turn", sim.turn, "Rotation per frame, radians");
  simulate->add_option("--pose-sigma", sim.pose_sigma);
  simulate->add_option("--depth-sigma", sim.depth_sigma);
  simulate->add_option("--pixel-sigma", sim.pixel_sigma);
  simulate->add_option("--out", sim.out, "Output directory");

  ConfigFlags sol;
  std::string problem_path;
  CLI::App* solve = app.add_subcommand("solve", "Optimize a problem dump");
  add_common(solve, sol);
  solve->add_option("--problem", problem_path)->required()->check(CLI::ExistingFile);
  solve->add_option("--iters", sol.iterations);
  solve->add_option("--damping", sol.damping);
  solve->add_option("--window", sol.window, "Sliding window size in frames");
  solve->add_option("--out", sol.out, "Output directory");

  std::string est_path, gt_path, metrics_path = "metrics.csv", sequence = "sequence";
  int delta = 1;
  bool no_scale = false;
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Trajectory metrics");
  evaluate_cmd->add_option("--est", est_path)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--gt", gt_path)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--out", metrics_path, "CSV output file");
  evaluate_cmd->add_option("--sequence", sequence, "Sequence name for the CSV row");
  evaluate_cmd->add_option("--delta", delta, "RPE frame offset")->check(CLI::PositiveNumber);
  evaluate_cmd->add_flag("--no-scale-correction", no_scale,
                         "Compute RPE without the alignment scale");

  int samples = 1000;
  std::uint64_t jac_seed = 0;
  int jac_width = 3840, jac_height = 1920;
  CLI::App* jacobian = app.add_subcommand("jacobian-check", "Compare analytic and numeric Jacobians");
  jacobian->add_option("--samples", samples)->check(CLI::PositiveNumber);
  jacobian->add_option("--seed", jac_seed);
  jacobian->add_option("--width", jac_width);
  jacobian->add_option("--height", jac_height);

  int grid_width = 3840, grid_height = 1920, kernel = 7;
  std::optional<double> grid_step;
  std::string grid_out = "grid.txt";
  CLI::App* grid = app.add_subcommand("grid", "Export per-row sampling grids");
  grid->add_option("--width", grid_width);
  grid->add_option("--height", grid_height);
  grid->add_option("--kernel", kernel);
  grid->add_option("--step", grid_step, "Tangent-plane step in radians");
  grid->add_option("--out", grid_out);

  std::string preset_name;
  CLI::App* preset = app.add_subcommand("preset", "Print a parameter set");
  preset->add_option("name", preset_name)->required()->check(CLI::IsMember({"default", "fast"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*simulate) return run_simulate(sim.resolve());
    if (*solve) return run_solve(problem_path, sol.resolve());
    if (*evaluate_cmd) {
      return run_evaluate(est_path, gt_path, metrics_path, sequence, delta, !no_scale);
    }
    if (*jacobian) return run_jacobian_check(samples, jac_seed, jac_width, jac_height);
    if (*grid) return run_grid(grid_width, grid_height, kernel, grid_step, grid_out);
    if (*preset) return run_preset(preset_name);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", to_string(e.code()), e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
