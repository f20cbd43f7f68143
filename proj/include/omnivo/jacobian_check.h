#pragma once

#include <cstdint>

#include "omnivo/odba.h"

namespace omnivo {

// Central-difference Jacobians of reproject_patch. Pose columns perturb on
// the left by +-pose_step along each twist axis; the depth column perturbs by
// +-depth_rel_step * d. Horizontal differences are seam-wrapped.
struct NumericEdgeJacobians {
  Matrix2x6 J_i;
  Matrix2x6 J_j;
  Eigen::Vector2d J_d;
};

NumericEdgeJacobians numeric_edge_jacobians(const Patch& patch, const PoseSE3& T_i,
                                            const PoseSE3& T_j, const SphericalCamera& cam,
                                            double pose_step = 1e-6,
                                            double depth_rel_step = 1e-8);

// ||analytic - numeric||_F / max(||numeric||_F, 1).
double jacobian_relative_error(const Eigen::MatrixXd& analytic,
                               const Eigen::MatrixXd& numeric);

struct JacobianCheckResult {
  int samples = 0;
  double max_error_i = 0.0;
  double max_error_j = 0.0;
  double max_error_d = 0.0;

  double max_error() const;
};

// Draws random pose pairs and patches whose source and reprojected latitudes
// stay within max_latitude and compares analytic and numeric Jacobians.
JacobianCheckResult check_edge_jacobians(int samples, std::uint64_t seed,
                                         const SphericalCamera& cam,
                                         double max_latitude = 85.0 * kPi / 180.0);

}  // namespace omnivo
