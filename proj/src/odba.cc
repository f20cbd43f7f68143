#include "omnivo/odba.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <Eigen/Cholesky>

#include "omnivo/error.h"

namespace omnivo {

void BAProblem::anchor_oldest(int count) {
  anchors.clear();
  const auto& frames = graph.frames();
  for (int k = 0; k < count && k < static_cast<int>(frames.size()); ++k) {
    anchors.insert(frames[static_cast<size_t>(k)]);
  }
}

void BAProblem::validate() const {
  for (FrameId f : graph.frames()) {
    if (!poses.count(f)) {
      throw Error(ErrorCode::kInvalidArgument, "frame " + std::to_string(f) + " has no pose");
    }
  }
  for (const Edge& e : graph.edges()) {
    auto it = observations.find(e);
    if (it == observations.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "edge (" + std::to_string(e.patch) + ", " + std::to_string(e.target_frame) +
                      ") has no observation");
    }
    if (!(it->second.weight.minCoeff() >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "negative observation weight");
    }
  }
  const size_t needed = std::min<size_t>(2, graph.frames().size());
  size_t anchored = 0;
  for (FrameId f : anchors) anchored += graph.is_active(f) ? 1 : 0;
  if (anchored < needed) {
    throw Error(ErrorCode::kInvalidArgument,
                "at least two anchored frames are required to fix the gauge");
  }
}

namespace {

// Point of patch `patch` expressed in camera j, or nullopt when it cannot be
// projected there.
std::optional<Eigen::Vector3d> transformed_point(const Patch& patch, const PoseSE3& T_ij,
                                                 const SphericalCamera& cam) {
  const Eigen::Vector3d X = unproject(patch.center, patch.inv_depth, cam).head<3>();
  const Eigen::Vector3d Xj = T_ij.act(X);
  if (classify_point(Xj) != PointStatus::kOk) return std::nullopt;
  return Xj;
}

}  // namespace

std::optional<PixelCoord> try_reproject_patch(const Patch& patch, const PoseSE3& T_i,
                                              const PoseSE3& T_j,
                                              const SphericalCamera& cam) {
  const PoseSE3 T_ij = T_j * T_i.inverse();
  const auto Xj = transformed_point(patch, T_ij, cam);
  if (!Xj) return std::nullopt;
  return try_project(*Xj, cam);
}

PixelCoord reproject_patch(const Patch& patch, const PoseSE3& T_i, const PoseSE3& T_j,
                           const SphericalCamera& cam) {
  const PoseSE3 T_ij = T_j * T_i.inverse();
  const Eigen::Vector3d X = unproject(patch.center, patch.inv_depth, cam).head<3>();
  return project(Eigen::Vector3d(T_ij.act(X)), cam);
}

Eigen::Vector2d residual(const PixelCoord& p_star, const PixelCoord& p_prime,
                         const SphericalCamera& cam) {
  return {wrap_u_difference(p_star.u - p_prime.u, cam), p_star.v - p_prime.v};
}

std::optional<EdgeJacobians> try_edge_jacobians(const Patch& patch, const PoseSE3& T_i,
                                                const PoseSE3& T_j,
                                                const SphericalCamera& cam) {
  const PoseSE3 T_ij = T_j * T_i.inverse();
  const auto Xj = transformed_point(patch, T_ij, cam);
  if (!Xj) return std::nullopt;

  const Eigen::Matrix<double, 2, 3> dproj =
      projection_jacobian(homogeneous(*Xj), cam).leftCols<3>();

  // Left perturbation of T_j moves X' by v + omega x X'.
  Eigen::Matrix<double, 3, 6> dX_dxi;
  dX_dxi.block<3, 3>(0, kTwistTranslation).setIdentity();
  dX_dxi.block<3, 3>(0, kTwistRotation) = -hat(*Xj);

  EdgeJacobians J;
  J.J_j = dproj * dX_dxi;
  J.J_i = -J.J_j * adjoint(T_ij);
  const Eigen::Vector3d dX_dd =
      unprojection_depth_jacobian(patch.center, patch.inv_depth, cam).head<3>();
  J.J_d = dproj * (T_ij.rotation() * dX_dd);
  J.reprojection = project(*Xj, cam);
  return J;
}

EdgeJacobians edge_jacobians(const Patch& patch, const PoseSE3& T_i, const PoseSE3& T_j,
                             const SphericalCamera& cam) {
  auto J = try_edge_jacobians(patch, T_i, T_j, cam);
  if (!J) {
    throw Error(ErrorCode::kPoleSingular,
                "reprojection of patch " + std::to_string(patch.id) +
                    " falls inside the pole guard");
  }
  return *J;
}

NormalEquations build_normal_equations(const BAProblem& problem,
                                       const SphericalCamera& cam) {
  NormalEquations ne;
  std::unordered_map<FrameId, int> pose_index;
  for (FrameId f : problem.graph.frames()) {
    if (problem.anchors.count(f)) continue;
    pose_index[f] = static_cast<int>(ne.free_frames.size());
    ne.free_frames.push_back(f);
  }
  std::unordered_map<PatchId, int> depth_index;
  for (const Edge& e : problem.graph.edges()) {
    if (depth_index.emplace(e.patch, static_cast<int>(ne.patch_ids.size())).second) {
      ne.patch_ids.push_back(e.patch);
    }
  }
  // Sorted patch order keeps the system layout independent of edge order.
  std::sort(ne.patch_ids.begin(), ne.patch_ids.end());
  for (size_t k = 0; k < ne.patch_ids.size(); ++k) {
    depth_index[ne.patch_ids[k]] = static_cast<int>(k);
  }
  if (ne.free_frames.empty() && ne.patch_ids.empty()) {
    throw Error(ErrorCode::kNoFreeVariables, "every pose is anchored and no depth is observed");
  }

  const int F = static_cast<int>(ne.free_frames.size());
  const int P = static_cast<int>(ne.patch_ids.size());
  ne.A = Eigen::MatrixXd::Zero(6 * F, 6 * F);
  ne.B = Eigen::MatrixXd::Zero(6 * F, P);
  ne.C = Eigen::VectorXd::Zero(P);
  ne.r_pose = Eigen::VectorXd::Zero(6 * F);
  ne.r_depth = Eigen::VectorXd::Zero(P);

  for (const Edge& e : problem.graph.edges()) {
    const Patch& patch = problem.graph.patch(e.patch);
    const Observation& obs = problem.observations.at(e);
    const FrameId i = patch.source_frame;
    const FrameId j = e.target_frame;
    const auto J = try_edge_jacobians(patch, problem.poses.at(i), problem.poses.at(j), cam);
    if (!J) {
      ++ne.skipped_edges;
      continue;
    }
    ++ne.valid_edges;

    const Eigen::Vector2d res = residual(obs.target, J->reprojection, cam);
    const Eigen::Vector2d& w = obs.weight;
    ne.cost += res.dot(w.cwiseProduct(res));
    const Eigen::Vector2d we = w.cwiseProduct(res);
    const Eigen::Vector2d wJd = w.cwiseProduct(J->J_d);

    const int k = depth_index.at(e.patch);
    ne.C(k) += J->J_d.dot(wJd);
    ne.r_depth(k) += J->J_d.dot(we);

    const auto pi = pose_index.find(i);
    const auto pj = pose_index.find(j);
    const Matrix2x6 wJi = w.asDiagonal() * J->J_i;
    const Matrix2x6 wJj = w.asDiagonal() * J->J_j;
    if (pi != pose_index.end()) {
      const int a = 6 * pi->second;
      ne.A.block<6, 6>(a, a) += J->J_i.transpose() * wJi;
      ne.B.block<6, 1>(a, k) += J->J_i.transpose() * wJd;
      ne.r_pose.segment<6>(a) += J->J_i.transpose() * we;
    }
    if (pj != pose_index.end()) {
      const int b = 6 * pj->second;
      ne.A.block<6, 6>(b, b) += J->J_j.transpose() * wJj;
      ne.B.block<6, 1>(b, k) += J->J_j.transpose() * wJd;
      ne.r_pose.segment<6>(b) += J->J_j.transpose() * we;
    }
    if (pi != pose_index.end() && pj != pose_index.end()) {
      const int a = 6 * pi->second;
      const int b = 6 * pj->second;
      const Eigen::Matrix<double, 6, 6> Aij = J->J_i.transpose() * wJj;
      ne.A.block<6, 6>(a, b) += Aij;
      ne.A.block<6, 6>(b, a) += Aij.transpose();
    }
  }
  return ne;
}

double SchurUpdate::max_abs() const {
  double m = 0.0;
  if (pose.size() > 0) m = std::max(m, pose.cwiseAbs().maxCoeff());
  if (depth.size() > 0) m = std::max(m, depth.cwiseAbs().maxCoeff());
  return m;
}

SchurUpdate schur_solve(const NormalEquations& ne, double damping) {
  if (!(damping >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "damping must be >= 0");
  const Eigen::VectorXd C_damped =
      ne.C * (1.0 + damping) + Eigen::VectorXd::Constant(ne.C.size(), kDepthRegularizer);
  const Eigen::VectorXd C_inv = C_damped.cwiseInverse();

  SchurUpdate update;
  if (ne.pose_dim() == 0) {
    update.pose = Eigen::VectorXd::Zero(0);
    update.depth = C_inv.cwiseProduct(ne.r_depth);
    return update;
  }

  Eigen::MatrixXd S = ne.A;
  S.diagonal() *= (1.0 + damping);
  const Eigen::MatrixXd BCinv = ne.B * C_inv.asDiagonal();
  S.noalias() -= BCinv * ne.B.transpose();
  S = 0.5 * (S + S.transpose());
  const Eigen::VectorXd rhs = ne.r_pose - BCinv * ne.r_depth;

  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularSystem, "reduced camera system is not positive definite");
  }
  update.pose = llt.solve(rhs);
  if (!update.pose.allFinite()) {
    throw Error(ErrorCode::kSingularSystem, "reduced camera system solve produced non-finite values");
  }
  update.depth = C_inv.cwiseProduct(ne.r_depth - ne.B.transpose() * update.pose);
  return update;
}

namespace {

// Free variables of a problem, detached so trial steps can be evaluated
// without touching the problem.
struct State {
  std::map<FrameId, PoseSE3> poses;
  std::map<PatchId, double> depths;
};

State capture(const BAProblem& problem) {
  State s;
  s.poses = problem.poses;
  for (const auto& [id, p] : problem.graph.patches()) s.depths[id] = p.inv_depth.value;
  return s;
}

double cost_of(const BAProblem& problem, const State& state, const SphericalCamera& cam,
               int* skipped) {
  double cost = 0.0;
  int skip = 0;
  for (const Edge& e : problem.graph.edges()) {
    Patch patch = problem.graph.patch(e.patch);
    patch.inv_depth = InverseDepth(state.depths.at(e.patch));
    const auto p = try_reproject_patch(patch, state.poses.at(patch.source_frame),
                                       state.poses.at(e.target_frame), cam);
    if (!p) {
      ++skip;
      continue;
    }
    const Observation& obs = problem.observations.at(e);
    const Eigen::Vector2d res = residual(obs.target, *p, cam);
    cost += res.dot(obs.weight.cwiseProduct(res));
  }
  if (skipped) *skipped = skip;
  return cost;
}

State apply_update(const State& state, const NormalEquations& ne, const SchurUpdate& step,
                   double min_inv_depth) {
  State next = state;
  for (size_t k = 0; k < ne.free_frames.size(); ++k) {
    const Vector6d xi = step.pose.segment<6>(6 * static_cast<Eigen::Index>(k));
    PoseSE3& T = next.poses.at(ne.free_frames[k]);
    T = exp_se3(TwistSE3::from_vector(xi)) * T;
    T.reorthonormalize();
  }
  for (size_t k = 0; k < ne.patch_ids.size(); ++k) {
    double& d = next.depths.at(ne.patch_ids[k]);
    d = std::max(d + step.depth(static_cast<Eigen::Index>(k)), min_inv_depth);
  }
  return next;
}

void commit(BAProblem& problem, const State& state) {
  for (const auto& [f, T] : state.poses) {
    if (!problem.anchors.count(f)) problem.poses[f] = T;
  }
  for (const auto& [id, d] : state.depths) problem.graph.set_inv_depth(id, InverseDepth(d));
}

}  // namespace

double evaluate_cost(const BAProblem& problem, const SphericalCamera& cam, int* skipped) {
  return cost_of(problem, capture(problem), cam, skipped);
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kMaxIterations: return "max_iterations";
    case Termination::kStalled: return "stalled";
  }
  return "unknown";
}

SolveReport gauss_newton(BAProblem& problem, const SphericalCamera& cam,
                         const SolverOptions& options) {
  problem.validate();
  SolveReport report;
  State state = capture(problem);
  int skipped = 0;
  double cost = cost_of(problem, state, cam, &skipped);
  report.iterations.push_back({0, cost, options.damping, skipped, 0.0, 0.0});

  double lambda = options.damping;
  report.termination = Termination::kMaxIterations;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    // The normal equations are built from the current state.
    commit(problem, state);
    const NormalEquations ne = build_normal_equations(problem, cam);

    bool accepted = false;
    bool stop = false;
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
      const SchurUpdate step = schur_solve(ne, lambda);
      if (step.max_abs() < options.tolerance) {
        report.termination = Termination::kConverged;
        stop = true;
        break;
      }
      State trial = apply_update(state, ne, step, options.min_inv_depth);
      int trial_skipped = 0;
      const double trial_cost = cost_of(problem, trial, cam, &trial_skipped);
      if (trial_cost <= cost) {
        state = std::move(trial);
        cost = trial_cost;
        IterationRecord rec;
        rec.iteration = iter;
        rec.cost = cost;
        rec.damping = lambda;
        rec.skipped = trial_skipped;
        rec.max_pose_step = step.pose.size() ? step.pose.cwiseAbs().maxCoeff() : 0.0;
        rec.max_depth_step = step.depth.size() ? step.depth.cwiseAbs().maxCoeff() : 0.0;
        report.iterations.push_back(rec);
        if (lambda > 0.0) lambda = std::max(0.5 * lambda, options.damping_floor);
        accepted = true;
        break;
      }
      if (trial_cost - cost <= 1e-12 * cost + 1e-20) {
        report.termination = Termination::kStalled;
        stop = true;
        break;
      }
      ++report.rejected_steps;
      lambda = lambda > 0.0 ? 2.0 * lambda : SolverOptions{}.damping;
    }
    if (stop) break;
    if (!accepted) {
      commit(problem, state);
      throw Error(ErrorCode::kDivergenceDetected,
                  "cost increased after " + std::to_string(options.max_retries) +
                      " damping retries at iteration " + std::to_string(iter));
    }
  }
  commit(problem, state);
  return report;
}

std::vector<SolveReport> solve_sliding_window(BAProblem& problem, const SphericalCamera& cam,
                                              const SolverOptions& options, int window) {
  if (window < 2) throw Error(ErrorCode::kInvalidArgument, "window must be >= 2");
  problem.validate();
  std::vector<SolveReport> reports;
  const std::vector<FrameId> frames = problem.graph.frames();
  for (size_t n = 1; n < frames.size(); ++n) {
    std::set<FrameId> active;
    const size_t first = n + 1 > static_cast<size_t>(window) ? n + 1 - window : 0;
    for (size_t k = first; k <= n; ++k) active.insert(frames[k]);

    BAProblem sub;
    sub.graph = problem.graph.subgraph(active);
    if (sub.graph.edges().empty()) continue;
    for (FrameId f : active) sub.poses[f] = problem.poses.at(f);
    for (const Edge& e : sub.graph.edges()) sub.observations[e] = problem.observations.at(e);
    sub.anchor_oldest(2);
    // Frames anchored in the full problem stay fixed inside every window.
    for (FrameId f : problem.anchors) {
      if (active.count(f)) sub.anchors.insert(f);
    }

    reports.push_back(gauss_newton(sub, cam, options));

    for (FrameId f : active) {
      if (!problem.anchors.count(f)) problem.poses[f] = sub.poses.at(f);
    }
    for (const auto& [id, p] : sub.graph.patches()) {
      problem.graph.set_inv_depth(id, p.inv_depth);
    }
  }
  return reports;
}

}  // namespace omnivo
