#include "omnivo/jacobian_check.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace omnivo {
namespace {

Eigen::Vector2d wrapped_difference(const PixelCoord& plus, const PixelCoord& minus,
                                   const SphericalCamera& cam) {
  return {wrap_u_difference(plus.u - minus.u, cam), plus.v - minus.v};
}

}  // namespace

NumericEdgeJacobians numeric_edge_jacobians(const Patch& patch, const PoseSE3& T_i,
                                            const PoseSE3& T_j, const SphericalCamera& cam,
                                            double pose_step, double depth_rel_step) {
  NumericEdgeJacobians J;
  for (int k = 0; k < 6; ++k) {
    Vector6d xi = Vector6d::Zero();
    xi(k) = pose_step;
    const PoseSE3 up = exp_se3(TwistSE3::from_vector(xi));
    const PoseSE3 down = exp_se3(TwistSE3::from_vector(-xi));
    J.J_i.col(k) = wrapped_difference(reproject_patch(patch, up * T_i, T_j, cam),
                                      reproject_patch(patch, down * T_i, T_j, cam), cam) /
                   (2.0 * pose_step);
    J.J_j.col(k) = wrapped_difference(reproject_patch(patch, T_i, up * T_j, cam),
                                      reproject_patch(patch, T_i, down * T_j, cam), cam) /
                   (2.0 * pose_step);
  }
  const double h = depth_rel_step * patch.inv_depth.value;
  Patch plus = patch;
  Patch minus = patch;
  plus.inv_depth = InverseDepth(patch.inv_depth.value + h);
  minus.inv_depth = InverseDepth(patch.inv_depth.value - h);
  J.J_d = wrapped_difference(reproject_patch(plus, T_i, T_j, cam),
                             reproject_patch(minus, T_i, T_j, cam), cam) /
          (2.0 * h);
  return J;
}

double jacobian_relative_error(const Eigen::MatrixXd& analytic,
                               const Eigen::MatrixXd& numeric) {
  return (analytic - numeric).norm() / std::max(numeric.norm(), 1.0);
}

double JacobianCheckResult::max_error() const {
  return std::max({max_error_i, max_error_j, max_error_d});
}

JacobianCheckResult check_edge_jacobians(int samples, std::uint64_t seed,
                                         const SphericalCamera& cam, double max_latitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> lon(-kPi, kPi);
  std::uniform_real_distribution<double> lat(-max_latitude, max_latitude);
  std::uniform_real_distribution<double> dist(0.5, 10.0);

  auto random_pose = [&]() {
    Eigen::Vector3d axis(unit(rng), unit(rng), unit(rng));
    const double angle = 0.9 * kPi * (0.5 * (unit(rng) + 1.0));
    const Eigen::Vector3d omega = axis.normalized() * angle;
    const Eigen::Vector3d v(unit(rng), unit(rng), unit(rng));
    return exp_se3({v, omega});
  };

  JacobianCheckResult result;
  while (result.samples < samples) {
    const PoseSE3 T_i = random_pose();
    const PoseSE3 T_j = random_pose();
    Patch patch;
    patch.center = angles_to_pixel({lon(rng), lat(rng)}, cam);
    patch.inv_depth = InverseDepth(1.0 / dist(rng));

    const PoseSE3 T_ij = T_j * T_i.inverse();
    const Eigen::Vector3d Xj =
        T_ij.act(Eigen::Vector3d(unproject(patch.center, patch.inv_depth, cam).head<3>()));
    if (Xj.norm() < 0.1) continue;
    const double phi = std::asin(std::clamp(-Xj.y() / Xj.norm(), -1.0, 1.0));
    if (std::abs(phi) >= max_latitude) continue;

    const EdgeJacobians analytic = edge_jacobians(patch, T_i, T_j, cam);
    const NumericEdgeJacobians numeric = numeric_edge_jacobians(patch, T_i, T_j, cam);
    result.max_error_i =
        std::max(result.max_error_i, jacobian_relative_error(analytic.J_i, numeric.J_i));
    result.max_error_j =
        std::max(result.max_error_j, jacobian_relative_error(analytic.J_j, numeric.J_j));
    result.max_error_d =
        std::max(result.max_error_d, jacobian_relative_error(analytic.J_d, numeric.J_d));
    ++result.samples;
  }
  return result;
}

}  // namespace omnivo
