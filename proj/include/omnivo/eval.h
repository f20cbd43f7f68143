#pragma once

#include <string>
#include <utility>
#include <vector>

#include "omnivo/lie.h"

namespace omnivo {

// Trajectory metrics. Trajectory poses are camera-to-world, so positions are
// the pose translations.

struct TimedPose {
  double timestamp = 0.0;  // seconds
  PoseSE3 pose;
};

class Trajectory {
 public:
  Trajectory() = default;
  // Throws InvalidArgument unless timestamps are strictly increasing.
  explicit Trajectory(std::vector<TimedPose> entries);

  // Throws InvalidArgument unless t is past the last timestamp.
  void push_back(double t, const PoseSE3& pose);

  const std::vector<TimedPose>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const TimedPose& operator[](size_t i) const { return entries_[i]; }

 private:
  std::vector<TimedPose> entries_;
};

using IndexPairs = std::vector<std::pair<size_t, size_t>>;

// Half the median interval between consecutive ground-truth timestamps.
double default_max_dt(const Trajectory& gt);

// Greedy nearest-timestamp matching: candidate pairs within max_dt are taken
// in order of increasing |dt| and each entry is used at most once. The result
// is sorted by ground-truth index as (est, gt) pairs.
// Throws InvalidArgument when max_dt <= 0 and NoOverlap without any pair.
IndexPairs associate(const Trajectory& est, const Trajectory& gt, double max_dt);

// Least-squares similarity with dst ~ s R src + t (centered covariance SVD
// with the reflection fix). Throws InvalidArgument on mismatched sizes and
// DegenerateConfiguration for fewer than three points or collinear or
// coincident sources.
Sim3 umeyama_sim3(const std::vector<Eigen::Vector3d>& src,
                  const std::vector<Eigen::Vector3d>& dst);

struct EvalOptions {
  double max_dt = 0.0;  // <= 0 selects default_max_dt
  int rpe_delta = 1;    // frames
  // Scales estimated relative translations by the Umeyama scale before
  // computing RPE; monocular scale is otherwise unobservable.
  bool rpe_scale_correction = true;
};

// RMSE of position differences after Sim(3) alignment of est onto gt.
double ate_rmse(const Trajectory& est, const Trajectory& gt, const EvalOptions& options = {});

struct RelativePoseError {
  double translation = 0.0;  // m/frame
  double rotation_deg = 0.0;  // deg/frame
};

// For consecutive matched pairs m and m + delta the error pose is
// (gt_m^-1 gt_m+delta)^-1 (est_m^-1 est_m+delta); returns the RMSE of its
// translation norm and rotation angle, both divided by delta.
// Throws InvalidArgument when fewer than delta + 1 pairs match.
RelativePoseError rpe(const Trajectory& est, const Trajectory& gt,
                      const EvalOptions& options = {});

// A run succeeds when at least half of the ground-truth frames are matched.
bool run_success(const Trajectory& est, const Trajectory& gt, double max_dt = 0.0);

struct MetricsReport {
  double ate_rmse = 0.0;
  double rpe_t_rmse = 0.0;
  double rpe_r_rmse = 0.0;
  int matched_frames = 0;
  bool success = false;
};

MetricsReport evaluate(const Trajectory& est, const Trajectory& gt,
                       const EvalOptions& options = {});

// Mean of the metrics over runs, with matched frames averaged and success
// set when the majority of runs succeeded.
MetricsReport mean_report(const std::vector<MetricsReport>& runs);

struct MetricsSpread {
  MetricsReport mean;
  MetricsReport min;
  MetricsReport max;
  double success_rate = 0.0;
};

MetricsSpread aggregate(const std::vector<MetricsReport>& runs);

std::string metrics_csv_header();
// `sequence,ate_rmse,rpe_t,rpe_r,matched,success`, 6 significant digits,
// success as 1 or 0.
std::string metrics_csv_row(const std::string& sequence, const MetricsReport& report);

}  // namespace omnivo
