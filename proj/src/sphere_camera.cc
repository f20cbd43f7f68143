#include "omnivo/sphere_camera.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace omnivo {

SphericalCamera::SphericalCamera(int width, int height)
    : width_(width), height_(height) {
  if (width < 2 || height < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "camera resolution must be at least 2x2, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
}

PixelCoord angles_to_pixel(const SphericalAngles& angles,
                           const SphericalCamera& cam) {
  return {cam.fx() * angles.theta + cam.cx(), cam.fy() * angles.phi + cam.cy()};
}

namespace {

double wrap_angle(double theta) {
  if (theta >= -kPi && theta <= kPi) return theta;
  double wrapped = std::remainder(theta, 2.0 * kPi);
  return wrapped;
}

}  // namespace

SphericalAngles pixel_to_angles(const PixelCoord& p,
                                const SphericalCamera& cam) {
  double theta = (p.u - cam.cx()) / cam.fx();
  double phi = (p.v - cam.cy()) / cam.fy();
  if (phi > kPi / 2 || phi < -kPi / 2) {
    phi = std::remainder(phi, 2.0 * kPi);
    if (phi > kPi / 2) {
      phi = kPi - phi;
      theta += kPi;
    } else if (phi < -kPi / 2) {
      phi = -kPi - phi;
      theta += kPi;
    }
  }
  return {wrap_angle(theta), phi};
}

Eigen::Vector3d bearing(const SphericalAngles& angles) {
  const double cp = std::cos(angles.phi);
  return {cp * std::sin(angles.theta), -std::sin(angles.phi),
          cp * std::cos(angles.theta)};
}

PointStatus classify_point(const Eigen::Vector3d& xyz) {
  const double norm_sq = xyz.squaredNorm();
  if (!(norm_sq >= kNormEpsilon * kNormEpsilon)) return PointStatus::kDegenerate;
  const double radial_sq = xyz.x() * xyz.x() + xyz.z() * xyz.z();
  if (radial_sq < kPoleEpsilon * kPoleEpsilon * norm_sq) {
    return PointStatus::kPole;
  }
  return PointStatus::kOk;
}

namespace {

PixelCoord project_unchecked(const Eigen::Vector3d& xyz,
                             const SphericalCamera& cam) {
  const double inv_dist = 1.0 / xyz.norm();
  // Clamp guards asin against |d*y| landing a rounding step above 1.
  const double s = std::clamp(inv_dist * xyz.y(), -1.0, 1.0);
  const SphericalAngles angles{std::atan2(xyz.x(), xyz.z()), -std::asin(s)};
  return angles_to_pixel(angles, cam);
}

void throw_for_status(PointStatus status) {
  if (status == PointStatus::kDegenerate) {
    throw Error(ErrorCode::kDegeneratePoint, "point coincides with the camera center");
  }
  if (status == PointStatus::kPole) {
    throw Error(ErrorCode::kPoleSingular, "point lies on the polar axis");
  }
}

}  // namespace

std::optional<PixelCoord> try_project(const Eigen::Vector3d& xyz,
                                      const SphericalCamera& cam) {
  if (classify_point(xyz) != PointStatus::kOk) return std::nullopt;
  return project_unchecked(xyz, cam);
}

PixelCoord project(const Eigen::Vector3d& xyz, const SphericalCamera& cam) {
  throw_for_status(classify_point(xyz));
  return project_unchecked(xyz, cam);
}

PixelCoord project(const Point3H& X, const SphericalCamera& cam) {
  return project(Eigen::Vector3d(X.head<3>()), cam);
}

Point3H unproject(const PixelCoord& p, InverseDepth depth,
                  const SphericalCamera& cam) {
  if (!(depth.value > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth,
                "inverse depth must be positive, got " + std::to_string(depth.value));
  }
  return homogeneous(bearing(pixel_to_angles(p, cam)) / depth.value);
}

Matrix2x4 projection_jacobian(const Point3H& X, const SphericalCamera& cam) {
  const Eigen::Vector3d xyz = X.head<3>();
  throw_for_status(classify_point(xyz));
  const double x = xyz.x(), y = xyz.y(), z = xyz.z();
  const double d_sq = 1.0 / xyz.squaredNorm();
  const double dhat_sq = 1.0 / (x * x + z * z);
  const double dhat = std::sqrt(dhat_sq);

  Matrix2x4 J;
  J.row(0) << z, 0.0, -x, 0.0;
  J.row(0) *= dhat_sq * cam.fx();
  // dv/dy carries -1/dhat: v grows with y (downward), and fy < 0.
  J.row(1) << x * y * dhat, -1.0 / dhat, y * z * dhat, 0.0;
  J.row(1) *= d_sq * cam.fy();
  return J;
}

Eigen::Vector4d unprojection_depth_jacobian(const PixelCoord& p,
                                            InverseDepth depth,
                                            const SphericalCamera& cam) {
  if (!(depth.value > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth,
                "inverse depth must be positive, got " + std::to_string(depth.value));
  }
  const Eigen::Vector3d b = bearing(pixel_to_angles(p, cam));
  Eigen::Vector4d J;
  J << b, 0.0;
  return -J / (depth.value * depth.value);
}

double wrap_u_difference(double du, const SphericalCamera& cam) {
  const double w = cam.width();
  const double half = 0.5 * w;
  if (du >= -half && du < half) return du;
  double wrapped = du - w * std::floor((du + half) / w);
  if (wrapped >= half) wrapped -= w;
  if (wrapped < -half) wrapped += w;
  return wrapped;
}

double wrap_u(double u, const SphericalCamera& cam) {
  const double w = cam.width();
  if (u >= 0.0 && u < w) return u;
  double wrapped = u - w * std::floor(u / w);
  if (wrapped >= w) wrapped -= w;
  return wrapped;
}

}  // namespace omnivo
