#include "omnivo/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/SVD>

#include "omnivo/constants.h"
#include "omnivo/error.h"

namespace omnivo {

Trajectory::Trajectory(std::vector<TimedPose> entries) {
  for (const TimedPose& e : entries) push_back(e.timestamp, e.pose);
}

void Trajectory::push_back(double t, const PoseSE3& pose) {
  if (!std::isfinite(t)) throw Error(ErrorCode::kInvalidArgument, "non-finite timestamp");
  if (!entries_.empty() && !(t > entries_.back().timestamp)) {
    throw Error(ErrorCode::kInvalidArgument, "timestamps must be strictly increasing");
  }
  entries_.push_back({t, pose});
}

double default_max_dt(const Trajectory& gt) {
  if (gt.size() < 2) return 1e-3;
  std::vector<double> dt;
  dt.reserve(gt.size() - 1);
  for (size_t i = 1; i < gt.size(); ++i) dt.push_back(gt[i].timestamp - gt[i - 1].timestamp);
  const size_t mid = dt.size() / 2;
  std::nth_element(dt.begin(), dt.begin() + static_cast<std::ptrdiff_t>(mid), dt.end());
  double median = dt[mid];
  if (dt.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(dt.begin(), dt.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return 0.5 * median;
}

IndexPairs associate(const Trajectory& est, const Trajectory& gt, double max_dt) {
  if (!(max_dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "max_dt must be positive");
  struct Candidate {
    double dt;
    size_t est;
    size_t gt;
  };
  std::vector<Candidate> candidates;
  // Both sequences are sorted, so every partner of est[i] lies in a window
  // of gt that advances monotonically.
  size_t lo = 0;
  for (size_t i = 0; i < est.size(); ++i) {
    const double t = est[i].timestamp;
    while (lo < gt.size() && gt[lo].timestamp < t - max_dt) ++lo;
    for (size_t j = lo; j < gt.size() && gt[j].timestamp <= t + max_dt; ++j) {
      candidates.push_back({std::abs(gt[j].timestamp - t), i, j});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.dt < b.dt; });
  std::vector<bool> est_used(est.size(), false), gt_used(gt.size(), false);
  IndexPairs pairs;
  for (const Candidate& c : candidates) {
    if (est_used[c.est] || gt_used[c.gt]) continue;
    est_used[c.est] = gt_used[c.gt] = true;
    pairs.emplace_back(c.est, c.gt);
  }
  if (pairs.empty()) throw Error(ErrorCode::kNoOverlap, "trajectories share no timestamps");
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  return pairs;
}

Sim3 umeyama_sim3(const std::vector<Eigen::Vector3d>& src,
                  const std::vector<Eigen::Vector3d>& dst) {
  if (src.size() != dst.size()) {
    throw Error(ErrorCode::kInvalidArgument, "point sets differ in size");
  }
  if (src.size() < 3) {
    throw Error(ErrorCode::kDegenerateConfiguration, "alignment needs at least three points");
  }
  const double n = static_cast<double>(src.size());
  Eigen::Vector3d mu_s = Eigen::Vector3d::Zero(), mu_d = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < src.size(); ++i) {
    mu_s += src[i];
    mu_d += dst[i];
  }
  mu_s /= n;
  mu_d /= n;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d src_scatter = Eigen::Matrix3d::Zero();
  double var_s = 0.0;
  for (size_t i = 0; i < src.size(); ++i) {
    const Eigen::Vector3d a = src[i] - mu_s;
    const Eigen::Vector3d b = dst[i] - mu_d;
    cov += b * a.transpose();
    src_scatter += a * a.transpose();
    var_s += a.squaredNorm();
  }
  cov /= n;
  var_s /= n;

  // The source scatter has rank >= 2 unless the points are collinear or
  // coincident, in which case the rotation about the line is undetermined.
  Eigen::JacobiSVD<Eigen::Matrix3d> scatter_svd(src_scatter);
  const Eigen::Vector3d sv = scatter_svd.singularValues();
  if (!(var_s > 0.0) || sv(1) <= 1e-12 * sv(0)) {
    throw Error(ErrorCode::kDegenerateConfiguration, "source points are collinear or coincident");
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d S = Eigen::Matrix3d::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) S(2, 2) = -1.0;

  Sim3 sim;
  sim.rotation = svd.matrixU() * S * svd.matrixV().transpose();
  sim.scale = (svd.singularValues().asDiagonal() * S).trace() / var_s;
  sim.translation = mu_d - sim.scale * (sim.rotation * mu_s);
  return sim;
}

namespace {

double resolved_max_dt(const Trajectory& gt, const EvalOptions& options) {
  return options.max_dt > 0.0 ? options.max_dt : default_max_dt(gt);
}

void matched_positions(const Trajectory& est, const Trajectory& gt, const IndexPairs& pairs,
                       std::vector<Eigen::Vector3d>& src, std::vector<Eigen::Vector3d>& dst) {
  src.clear();
  dst.clear();
  for (const auto& [i, j] : pairs) {
    src.push_back(est[i].pose.translation());
    dst.push_back(gt[j].pose.translation());
  }
}

double ate_from_pairs(const Trajectory& est, const Trajectory& gt, const IndexPairs& pairs,
                      double* scale) {
  std::vector<Eigen::Vector3d> src, dst;
  matched_positions(est, gt, pairs, src, dst);
  const Sim3 sim = umeyama_sim3(src, dst);
  if (scale) *scale = sim.scale;
  double sum = 0.0;
  for (size_t k = 0; k < src.size(); ++k) sum += (dst[k] - sim.apply(src[k])).squaredNorm();
  return std::sqrt(sum / static_cast<double>(src.size()));
}

RelativePoseError rpe_from_pairs(const Trajectory& est, const Trajectory& gt,
                                 const IndexPairs& pairs, int delta, double scale) {
  if (delta < 1) throw Error(ErrorCode::kInvalidArgument, "rpe delta must be >= 1");
  if (pairs.size() < static_cast<size_t>(delta) + 1) {
    throw Error(ErrorCode::kInvalidArgument, "too few matched poses for the rpe delta");
  }
  double sum_t = 0.0, sum_r = 0.0;
  size_t count = 0;
  for (size_t m = 0; m + static_cast<size_t>(delta) < pairs.size(); ++m) {
    const auto& a = pairs[m];
    const auto& b = pairs[m + static_cast<size_t>(delta)];
    const PoseSE3 rel_gt = gt[a.second].pose.inverse() * gt[b.second].pose;
    PoseSE3 rel_est = est[a.first].pose.inverse() * est[b.first].pose;
    rel_est = PoseSE3(rel_est.rotation(), scale * rel_est.translation());
    const PoseSE3 err = rel_gt.inverse() * rel_est;
    const double t = err.translation().norm() / delta;
    const double r = rotation_angle(err.rotation()) * 180.0 / kPi / delta;
    sum_t += t * t;
    sum_r += r * r;
    ++count;
  }
  return {std::sqrt(sum_t / count), std::sqrt(sum_r / count)};
}

}  // namespace

double ate_rmse(const Trajectory& est, const Trajectory& gt, const EvalOptions& options) {
  const IndexPairs pairs = associate(est, gt, resolved_max_dt(gt, options));
  return ate_from_pairs(est, gt, pairs, nullptr);
}

RelativePoseError rpe(const Trajectory& est, const Trajectory& gt, const EvalOptions& options) {
  const IndexPairs pairs = associate(est, gt, resolved_max_dt(gt, options));
  double scale = 1.0;
  if (options.rpe_scale_correction) ate_from_pairs(est, gt, pairs, &scale);
  return rpe_from_pairs(est, gt, pairs, options.rpe_delta, scale);
}

bool run_success(const Trajectory& est, const Trajectory& gt, double max_dt) {
  if (gt.empty()) return false;
  if (est.empty()) return false;
  size_t matched = 0;
  try {
    matched = associate(est, gt, max_dt > 0.0 ? max_dt : default_max_dt(gt)).size();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoOverlap) throw;
  }
  return 2 * matched >= gt.size();
}

MetricsReport evaluate(const Trajectory& est, const Trajectory& gt, const EvalOptions& options) {
  const IndexPairs pairs = associate(est, gt, resolved_max_dt(gt, options));
  MetricsReport report;
  double scale = 1.0;
  report.ate_rmse = ate_from_pairs(est, gt, pairs, &scale);
  const RelativePoseError r =
      rpe_from_pairs(est, gt, pairs, options.rpe_delta, options.rpe_scale_correction ? scale : 1.0);
  report.rpe_t_rmse = r.translation;
  report.rpe_r_rmse = r.rotation_deg;
  report.matched_frames = static_cast<int>(pairs.size());
  report.success = 2 * pairs.size() >= gt.size();
  return report;
}

MetricsSpread aggregate(const std::vector<MetricsReport>& runs) {
  if (runs.empty()) throw Error(ErrorCode::kInvalidArgument, "no runs to aggregate");
  MetricsSpread s;
  s.min = s.max = runs.front();
  double matched = 0.0;
  int successes = 0;
  for (const MetricsReport& r : runs) {
    s.mean.ate_rmse += r.ate_rmse;
    s.mean.rpe_t_rmse += r.rpe_t_rmse;
    s.mean.rpe_r_rmse += r.rpe_r_rmse;
    matched += r.matched_frames;
    successes += r.success ? 1 : 0;
    s.min.ate_rmse = std::min(s.min.ate_rmse, r.ate_rmse);
    s.min.rpe_t_rmse = std::min(s.min.rpe_t_rmse, r.rpe_t_rmse);
    s.min.rpe_r_rmse = std::min(s.min.rpe_r_rmse, r.rpe_r_rmse);
    s.min.matched_frames = std::min(s.min.matched_frames, r.matched_frames);
    s.min.success = s.min.success && r.success;
    s.max.ate_rmse = std::max(s.max.ate_rmse, r.ate_rmse);
    s.max.rpe_t_rmse = std::max(s.max.rpe_t_rmse, r.rpe_t_rmse);
    s.max.rpe_r_rmse = std::max(s.max.rpe_r_rmse, r.rpe_r_rmse);
    s.max.matched_frames = std::max(s.max.matched_frames, r.matched_frames);
    s.max.success = s.max.success || r.success;
  }
  const double n = static_cast<double>(runs.size());
  s.mean.ate_rmse /= n;
  s.mean.rpe_t_rmse /= n;
  s.mean.rpe_r_rmse /= n;
  s.mean.matched_frames = static_cast<int>(std::lround(matched / n));
  s.success_rate = successes / n;
  s.mean.success = 2 * successes > static_cast<int>(runs.size());
  return s;
}

MetricsReport mean_report(const std::vector<MetricsReport>& runs) {
  return aggregate(runs).mean;
}

std::string metrics_csv_header() {
  return "sequence,ate_rmse,rpe_t,rpe_r,matched,success";
}

std::string metrics_csv_row(const std::string& sequence, const MetricsReport& report) {
  char buf[128];
  std::snprintf(buf, sizeof buf, ",%.6g,%.6g,%.6g,%d,%d", report.ate_rmse, report.rpe_t_rmse,
                report.rpe_r_rmse, report.matched_frames, report.success ? 1 : 0);
  return sequence + buf;
}

}  // namespace omnivo
